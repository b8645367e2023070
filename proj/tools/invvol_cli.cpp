// Command-line front end for the inverse-option toolkit: Monte Carlo
// pricing, ATM implied-vol levels and skews, skew term structures, and
// power-law fitting of market delta-skew quotes.
//
// Exit codes: 0 success; 2 configuration/input problems; 3 numerical
// failures; 4 sign problems in market skew data.  Diagnostics go to
// standard error; results go to standard output (or --out).

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "invvol/invvol.hpp"

namespace {

using nlohmann::json;

// Shortest round-trip-exact decimal form; byte-stable across runs.
std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

struct Overrides {
    std::string config_path;
    std::optional<std::string> model;
    std::optional<double> sigma0, alpha, rho, v, hurst;
    std::optional<double> spot, strike, maturity, rate_R;
    std::optional<std::string> kind;
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> paths, steps;
    std::optional<std::string> format;
    std::string out_path;
    bool scaled = false;
    std::string grid;         // iv-level sigma0 list, comma separated
    std::string maturities;   // term-structure list, comma separated
    std::string quotes_path;  // fit-market positional
};

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw invvol::ParseError("cannot open config file: " + path, 0);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw invvol::ParseError(
            std::string("config is not valid JSON: ") + e.what(), 0);
    }
}

double pickd(const std::optional<double>& flag, const json& obj,
             const char* key, double dflt) {
    if (flag) return *flag;
    return obj.value(key, dflt);
}

struct RunConfig {
    invvol::ModelParams model;
    invvol::OptionSpec option;
    invvol::SimConfig sim;
    std::string format;  // "json", "csv", or "" meaning the command default
};

// Precedence: command-line flag > config-file value > built-in default.
RunConfig build_run_config(const Overrides& o) {
    const json cfg =
        o.config_path.empty() ? json::object() : load_json_file(o.config_path);
    if (!cfg.is_object())
        throw invvol::ParseError("config root must be a JSON object", 0);
    const json model_j = cfg.value("model", json::object());
    const json option_j = cfg.value("option", json::object());
    const json sim_j = cfg.value("sim", json::object());

    RunConfig rc;

    const std::string type =
        o.model ? *o.model : model_j.value("type", std::string("sabr"));
    if (type == "constvol") {
        invvol::ConstVolParams p;
        p.sigma0 = pickd(o.sigma0, model_j, "sigma0", p.sigma0);
        rc.model = p;
    } else if (type == "sabr") {
        invvol::SabrParams p;
        p.sigma0 = pickd(o.sigma0, model_j, "sigma0", p.sigma0);
        p.alpha = pickd(o.alpha, model_j, "alpha", p.alpha);
        p.rho = pickd(o.rho, model_j, "rho", p.rho);
        rc.model = p;
    } else if (type == "bergomi") {
        invvol::BergomiParams p;
        p.sigma0 = pickd(o.sigma0, model_j, "sigma0", p.sigma0);
        p.v = pickd(o.v, model_j, "v", p.v);
        p.rho = pickd(o.rho, model_j, "rho", p.rho);
        p.hurst = pickd(o.hurst, model_j, "hurst", p.hurst);
        rc.model = p;
    } else {
        throw std::invalid_argument("unknown model type: " + type);
    }

    rc.option.spot = pickd(o.spot, option_j, "spot", rc.option.spot);
    rc.option.strike = pickd(o.strike, option_j, "strike", rc.option.strike);
    rc.option.maturity =
        pickd(o.maturity, option_j, "maturity", rc.option.maturity);
    rc.option.rate_R = pickd(o.rate_R, option_j, "rate_R", rc.option.rate_R);
    const std::string kind =
        o.kind ? *o.kind : option_j.value("kind", std::string("inverse"));
    if (kind == "inverse") {
        rc.option.kind = invvol::PayoffKind::Inverse;
    } else if (kind == "quanto-inverse") {
        rc.option.kind = invvol::PayoffKind::QuantoInverse;
    } else {
        throw std::invalid_argument("unknown payoff kind: " + kind);
    }

    const std::int64_t paths =
        o.paths ? *o.paths
                : sim_j.value("paths", static_cast<std::int64_t>(rc.sim.n_paths));
    const std::int64_t steps =
        o.steps ? *o.steps
                : sim_j.value("steps", static_cast<std::int64_t>(rc.sim.n_steps));
    if (paths <= 0) throw invvol::ValidationError("paths must be positive");
    if (steps <= 0) throw invvol::ValidationError("steps must be positive");
    rc.sim.n_paths = static_cast<std::size_t>(paths);
    rc.sim.n_steps = static_cast<int>(steps);
    rc.sim.seed = o.seed ? *o.seed : sim_j.value("seed", rc.sim.seed);
    rc.sim.antithetic = sim_j.value("antithetic", rc.sim.antithetic);

    rc.format = o.format ? *o.format : cfg.value("format", std::string());
    if (!rc.format.empty() && rc.format != "json" && rc.format != "csv")
        throw std::invalid_argument("format must be json or csv");

    invvol::validate(rc.model);
    invvol::validate(rc.option);
    invvol::validate(rc.sim);
    return rc;
}

std::vector<double> parse_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t b = 0, e = item.size();
        while (b < e && std::isspace(static_cast<unsigned char>(item[b]))) ++b;
        while (e > b && std::isspace(static_cast<unsigned char>(item[e - 1])))
            --e;
        const std::string t = item.substr(b, e - b);
        if (t.empty())
            throw std::invalid_argument(std::string(what) + ": empty entry");
        char* end = nullptr;
        const double v = std::strtod(t.c_str(), &end);
        if (end != t.c_str() + t.size() || !std::isfinite(v))
            throw std::invalid_argument(std::string(what) + ": bad number `" +
                                        t + "`");
        out.push_back(v);
    }
    return out;
}

void emit(const std::string& payload, const std::string& out_path) {
    if (out_path.empty()) {
        std::fwrite(payload.data(), 1, payload.size(), stdout);
        return;
    }
    std::ofstream f(out_path, std::ios::trunc | std::ios::binary);
    if (!f) throw std::invalid_argument("cannot open output file: " + out_path);
    f << payload;
    f.flush();
    if (!f) throw std::runtime_error("failed writing output file: " + out_path);
}

std::string cmd_price(const RunConfig& rc) {
    const invvol::McEstimate est =
        invvol::price_option(rc.model, rc.option, rc.sim);
    if (rc.format == "csv") {
        return "price,stderr,n\n" + fmt(est.value) + "," + fmt(est.std_error) +
               "," + std::to_string(est.n_samples) + "\n";
    }
    return "{\"price\": " + fmt(est.value) + ", \"stderr\": " +
           fmt(est.std_error) + ", \"n\": " + std::to_string(est.n_samples) +
           "}\n";
}

std::string cmd_iv_level(const RunConfig& rc, const std::vector<double>& grid) {
    if (grid.empty())
        throw std::invalid_argument("iv-level needs a nonempty sigma0 grid");
    std::string csv = "sigma0,iv_mc,iv_limit\n";
    std::string jsn = "[";
    bool first = true;
    for (const double s : grid) {
        invvol::ModelParams m = rc.model;
        std::visit([&](auto& p) { p.sigma0 = s; }, m);
        invvol::validate(m);
        const invvol::McEstimate est = invvol::atm_iv_mc(m, rc.option, rc.sim);
        const double limit = invvol::atm_level_limit(m);
        csv += fmt(s) + "," + fmt(est.value) + "," + fmt(limit) + "\n";
        jsn += std::string(first ? "" : ", ") + "{\"sigma0\": " + fmt(s) +
               ", \"iv_mc\": " + fmt(est.value) + ", \"iv_limit\": " +
               fmt(limit) + "}";
        first = false;
    }
    jsn += "]\n";
    return rc.format == "json" ? jsn : csv;
}

std::string cmd_skew(const RunConfig& rc, bool scaled) {
    const invvol::AtmSkewResult res =
        invvol::atm_skew_mc(rc.model, rc.option, rc.sim);
    const invvol::SkewLimit lim = invvol::skew_limit(rc.model);
    // With a zero scaling exponent the factor is exactly 1, so scaled and
    // raw reports coincide bitwise for models whose skew limit is finite.
    const double factor =
        scaled ? std::pow(rc.option.maturity, lim.scaling_exponent) : 1.0;
    const double skew_out = factor * res.skew.value;
    const double se_out = factor * res.skew.std_error;
    if (rc.format == "csv") {
        return "skew_mc,skew_stderr,skew_limit,scaling_exponent,scaled\n" +
               fmt(skew_out) + "," + fmt(se_out) + "," + fmt(lim.value) + "," +
               fmt(lim.scaling_exponent) + "," + (scaled ? "1" : "0") + "\n";
    }
    return "{\"skew_mc\": " + fmt(skew_out) + ", \"skew_stderr\": " +
           fmt(se_out) + ", \"skew_limit\": " + fmt(lim.value) +
           ", \"scaling_exponent\": " + fmt(lim.scaling_exponent) +
           ", \"scaled\": " + (scaled ? "true" : "false") + "}\n";
}

std::string cmd_term_structure(const RunConfig& rc,
                               const std::vector<double>& maturities) {
    if (maturities.empty())
        throw std::invalid_argument(
            "term-structure needs at least one maturity (--maturities)");
    std::string csv = "maturity_years,skew_mc\n";
    std::string jsn = "[";
    bool first = true;
    for (const double T : maturities) {
        invvol::OptionSpec opt = rc.option;
        opt.maturity = T;
        const invvol::AtmSkewResult res =
            invvol::atm_skew_mc(rc.model, opt, rc.sim);
        csv += fmt(T) + "," + fmt(res.skew.value) + "\n";
        jsn += std::string(first ? "" : ", ") + "{\"maturity_years\": " +
               fmt(T) + ", \"skew_mc\": " + fmt(res.skew.value) + "}";
        first = false;
    }
    jsn += "]\n";
    return rc.format == "json" ? jsn : csv;
}

std::string cmd_fit_market(const std::string& quotes_path,
                           const std::string& format) {
    const std::vector<invvol::QuoteRow> rows = invvol::load_quotes(quotes_path);
    if (rows.empty())
        throw invvol::InsufficientData("no quote rows in " + quotes_path);
    std::vector<invvol::SkewPoint> pts;
    pts.reserve(rows.size());
    for (const invvol::QuoteRow& r : rows) pts.push_back(invvol::delta_skew(r));
    const invvol::PowerLawFit fit = invvol::fit_power_law(pts);
    // Echo the shortest-maturity anchors: its skew and its ATM (50-delta
    // call) implied vol, the quote file's level metadata.
    const double shortest_skew = pts.front().skew;
    const double shortest_iv = rows.front().iv_call_d50;
    if (format == "csv") {
        return "c,alpha,h_implied,r_squared,shortest_maturity_skew,"
               "shortest_maturity_atm_iv\n" +
               fmt(fit.c) + "," + fmt(fit.alpha) + "," + fmt(fit.h_implied) +
               "," + fmt(fit.r_squared) + "," + fmt(shortest_skew) + "," +
               fmt(shortest_iv) + "\n";
    }
    return "{\"c\": " + fmt(fit.c) + ", \"alpha\": " + fmt(fit.alpha) +
           ", \"h_implied\": " + fmt(fit.h_implied) + ", \"r_squared\": " +
           fmt(fit.r_squared) + ", \"shortest_maturity_skew\": " +
           fmt(shortest_skew) + ", \"shortest_maturity_atm_iv\": " +
           fmt(shortest_iv) + "}\n";
}

void diag(const char* what) { std::fprintf(stderr, "error: %s\n", what); }

}  // namespace

int main(int argc, char** argv) {
    Overrides o;
    CLI::App app{
        "Inverse-option pricing, implied-volatility asymptotics, and market "
        "skew fitting"};
    app.require_subcommand(1);

    const auto add_common = [&o](CLI::App* c) {
        c->add_option("--config", o.config_path,
                      "JSON config file; flags override its values");
        c->add_option("--seed", o.seed, "RNG seed");
        c->add_option("--paths", o.paths, "Monte Carlo path count");
        c->add_option("--steps", o.steps, "time steps per path");
        c->add_option("--model", o.model, "volatility model")
            ->check(CLI::IsMember({"sabr", "bergomi", "constvol"}));
        c->add_option("--sigma0", o.sigma0, "initial volatility");
        c->add_option("--alpha", o.alpha, "lognormal vol-of-vol (sabr)");
        c->add_option("--rho", o.rho, "spot/vol correlation");
        c->add_option("--v", o.v, "fractional vol-of-vol (bergomi)");
        c->add_option("--hurst", o.hurst, "roughness index in (0,1) (bergomi)");
        c->add_option("--spot", o.spot, "spot price");
        c->add_option("--strike", o.strike, "strike price");
        c->add_option("--maturity", o.maturity, "maturity in years");
        c->add_option("--rate-R", o.rate_R,
                      "fixed conversion rate for quanto-inverse payoffs");
        c->add_option("--kind", o.kind, "payoff kind")
            ->check(CLI::IsMember({"inverse", "quanto-inverse"}));
        c->add_option("--format", o.format, "output format")
            ->check(CLI::IsMember({"json", "csv"}));
        c->add_option("--out", o.out_path,
                      "write output to this file instead of stdout");
        return c;
    };

    CLI::App* price = add_common(app.add_subcommand(
        "price", "Monte Carlo option price with standard error"));
    CLI::App* ivl = add_common(app.add_subcommand(
        "iv-level", "ATM implied vol across a sigma0 grid vs its limit"));
    ivl->add_option("--grid", o.grid,
                    "comma-separated sigma0 grid (default 0.1..1.4 step 0.1)");
    CLI::App* skw = add_common(app.add_subcommand(
        "skew", "ATM implied-vol skew vs its short-maturity limit"));
    skw->add_flag("--scaled", o.scaled,
                  "report T^{max(1/2-H,0)} * skew instead of the raw skew");
    CLI::App* ts = add_common(app.add_subcommand(
        "term-structure", "ATM skew for each requested maturity"));
    ts->add_option("--maturities", o.maturities,
                   "comma-separated maturities in years")
        ->required();
    CLI::App* fit = app.add_subcommand(
        "fit-market", "fit c*T^alpha to the delta skews of a quote file");
    fit->add_option("quotes", o.quotes_path,
                    "CSV of per-maturity delta-bucket implied vols")
        ->required();
    fit->add_option("--format", o.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));
    fit->add_option("--out", o.out_path,
                    "write output to this file instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        std::string payload;
        if (price->parsed()) {
            payload = cmd_price(build_run_config(o));
        } else if (ivl->parsed()) {
            const RunConfig rc = build_run_config(o);
            std::vector<double> grid;
            if (o.grid.empty()) {
                for (int i = 1; i <= 14; ++i)
                    grid.push_back(static_cast<double>(i) / 10.0);
            } else {
                grid = parse_list(o.grid, "--grid");
            }
            payload = cmd_iv_level(rc, grid);
        } else if (skw->parsed()) {
            payload = cmd_skew(build_run_config(o), o.scaled);
        } else if (ts->parsed()) {
            payload = cmd_term_structure(build_run_config(o),
                                         parse_list(o.maturities,
                                                    "--maturities"));
        } else if (fit->parsed()) {
            payload =
                cmd_fit_market(o.quotes_path, o.format ? *o.format : "json");
        }
        emit(payload, o.out_path);
        return 0;
    } catch (const invvol::SignError& e) {
        diag(e.what());
        return 4;
    } catch (const invvol::ParseError& e) {
        diag(e.what());
        return 2;
    } catch (const invvol::ValidationError& e) {
        diag(e.what());
        return 2;
    } catch (const invvol::InsufficientData& e) {
        diag(e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        diag(e.what());
        return 2;
    } catch (const json::exception& e) {
        diag(e.what());
        return 2;
    } catch (const std::exception& e) {
        diag(e.what());
        return 3;
    }
}
