#pragma once

// Market-quote ingestion and power-law skew fitting.
//
// A quote file is a CSV of per-maturity implied vols at three delta buckets
// (25-delta put, 25-delta call, 50-delta call).  Each maturity yields a
// normalized risk-reversal skew proxy
//
//     skew = (iv_put_d25 - iv_call_d25) / iv_call_d50,
//
// and the term structure of that proxy is fitted as c * T^alpha by ordinary
// least squares on log-log axes.  The implied roughness index is
// h_implied = alpha + 1/2.
//
// Note the proxy is a (dimensionless) normalized risk-reversal, not literally
// d(IV)/d(log-strike); it is implemented verbatim as defined above.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "invvol/errors.hpp"

namespace invvol {

// One CSV row: maturity in years plus implied vols at three delta buckets.
struct QuoteRow {
    double maturity_years = 0.0;
    double iv_put_d25 = 0.0;
    double iv_call_d25 = 0.0;
    double iv_call_d50 = 0.0;
};

// (maturity, skew-proxy) pair.
struct SkewPoint {
    double maturity_years = 0.0;
    double skew = 0.0;
};

// Result of the log-log OLS fit of |skew| = |c| * T^alpha.
struct PowerLawFit {
    double c = 0.0;          // signed coefficient: sign follows the skews
    double alpha = 0.0;      // power-law exponent (slope in log-log)
    double h_implied = 0.0;  // alpha + 0.5, always exactly
    double r_squared = 0.0;  // in [0, 1]; 1 for noise-free data
};

namespace detail {

inline std::string strip_ws(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

// Full-consumption numeric parse: the entire trimmed field must be a number.
inline bool parse_number(const std::string& field, double& out) {
    const std::string t = strip_ws(field);
    if (t.empty()) return false;
    const char* begin = t.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    return end == begin + t.size() && std::isfinite(out);
}

}  // namespace detail

// Parses a quote CSV.  The header must be exactly
// `maturity_years,iv_put_d25,iv_call_d25,iv_call_d50`; rows are validated
// (all values strictly positive, maturities pairwise distinct) and returned
// sorted by maturity.  Row numbers in errors are 1-based counting the header.
inline std::vector<QuoteRow> load_quotes(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open quote file: " + path, 0);

    static const std::string kHeader =
        "maturity_years,iv_put_d25,iv_call_d25,iv_call_d50";

    std::string line;
    int row = 0;
    bool saw_header = false;
    std::vector<QuoteRow> rows;

    while (std::getline(in, line)) {
        ++row;
        const std::string trimmed = detail::strip_ws(line);
        if (trimmed.empty()) continue;  // skip blank lines

        if (!saw_header) {
            if (trimmed != kHeader)
                throw ParseError("bad header, expected `" + kHeader + "`", row);
            saw_header = true;
            continue;
        }

        const std::vector<std::string> fields = detail::split_csv(trimmed);
        if (fields.size() != 4)
            throw ParseError("expected 4 comma-separated fields, got " +
                                 std::to_string(fields.size()),
                             row);

        QuoteRow q;
        double* slots[4] = {&q.maturity_years, &q.iv_put_d25, &q.iv_call_d25,
                            &q.iv_call_d50};
        for (int i = 0; i < 4; ++i) {
            if (!detail::parse_number(fields[i], *slots[i]))
                throw ParseError("field " + std::to_string(i + 1) +
                                     " is not a finite number: `" + fields[i] +
                                     "`",
                                 row);
        }

        if (q.maturity_years <= 0.0)
            throw ValidationError("maturity must be positive (row " +
                                  std::to_string(row) + ")");
        if (q.iv_put_d25 <= 0.0 || q.iv_call_d25 <= 0.0 || q.iv_call_d50 <= 0.0)
            throw ValidationError("implied vols must be positive (row " +
                                  std::to_string(row) + ")");
        rows.push_back(q);
    }

    if (!saw_header) throw ParseError("empty quote file: " + path, row);

    std::sort(rows.begin(), rows.end(), [](const QuoteRow& a, const QuoteRow& b) {
        return a.maturity_years < b.maturity_years;
    });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].maturity_years == rows[i - 1].maturity_years)
            throw ValidationError("duplicate maturity " +
                                  std::to_string(rows[i].maturity_years));
    }
    return rows;
}

// Normalized risk-reversal skew proxy for one maturity.
inline SkewPoint delta_skew(const QuoteRow& row) {
    if (row.iv_call_d50 == 0.0)
        throw DivisionByZero("iv_call_d50 is zero; delta skew is undefined");
    return {row.maturity_years,
            (row.iv_put_d25 - row.iv_call_d25) / row.iv_call_d50};
}

// Log-log OLS fit of the skew term structure as c * T^alpha.
//
// Requires at least 3 points whose skews are nonzero and share one sign
// (the log of the magnitude is regressed on log-maturity).  The input order
// is irrelevant: points are sorted by maturity before accumulating, so any
// permutation of the same points produces the bitwise-identical fit.
inline PowerLawFit fit_power_law(std::vector<SkewPoint> points) {
    if (points.size() < 3)
        throw InsufficientData("power-law fit needs at least 3 points, got " +
                               std::to_string(points.size()));

    std::sort(points.begin(), points.end(),
              [](const SkewPoint& a, const SkewPoint& b) {
                  return a.maturity_years < b.maturity_years;
              });

    double sign = 0.0;
    for (const SkewPoint& p : points) {
        if (p.maturity_years <= 0.0)
            throw ValidationError("maturity must be positive in fit input");
        if (p.skew == 0.0)
            throw SignError("skew of zero has no log-log representation");
        const double s = p.skew > 0.0 ? 1.0 : -1.0;
        if (sign == 0.0)
            sign = s;
        else if (s != sign)
            throw SignError("skews must share one sign for the log-log fit");
    }

    const std::size_t n = points.size();
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = std::log(points[i].maturity_years);
        ys[i] = std::log(std::fabs(points[i].skew));
    }

    double x_mean = 0.0, y_mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        x_mean += xs[i];
        y_mean += ys[i];
    }
    x_mean /= static_cast<double>(n);
    y_mean /= static_cast<double>(n);

    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - x_mean) * (xs[i] - x_mean);
        sxy += (xs[i] - x_mean) * (ys[i] - y_mean);
    }
    if (sxx == 0.0)
        throw ValidationError("all maturities coincide; slope is undefined");

    const double slope = sxy / sxx;
    const double intercept = y_mean - slope * x_mean;

    double ss_res = 0.0, ss_tot = 0.0, ms_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double fit_y = intercept + slope * xs[i];
        ss_res += (ys[i] - fit_y) * (ys[i] - fit_y);
        ss_tot += (ys[i] - y_mean) * (ys[i] - y_mean);
        ms_y += ys[i] * ys[i] / static_cast<double>(n);
    }

    PowerLawFit fit;
    fit.alpha = slope;
    fit.c = sign * std::exp(intercept);
    fit.h_implied = fit.alpha + 0.5;
    // A residual at double-rounding scale is a perfect fit.  Without this
    // floor, data that is exactly log-linear with zero slope has both sums
    // at ~1e-30 and the raw ratio reports r^2 near 0 instead of 1.
    const double noise_floor =
        1e-24 * static_cast<double>(n) * std::max(1.0, ms_y);
    if (ss_tot == 0.0 || ss_res <= noise_floor) {
        fit.r_squared = 1.0;
    } else {
        fit.r_squared = std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0);
    }
    return fit;
}

// Convenience: full pipeline from rows to fit.
inline PowerLawFit fit_power_law_from_rows(const std::vector<QuoteRow>& rows) {
    std::vector<SkewPoint> points;
    points.reserve(rows.size());
    for (const QuoteRow& r : rows) points.push_back(delta_skew(r));
    return fit_power_law(std::move(points));
}

}  // namespace invvol
