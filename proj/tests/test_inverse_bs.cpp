#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>

#include "invvol/inverse_bs.hpp"

using namespace invvol;

namespace {
const double kLn100 = std::log(100.0);
const double kLn120 = std::log(120.0);
}  // namespace

TEST_CASE("zero time to maturity returns the payoff branch") {
    CHECK(bs_price({0.0, kLn120, kLn100, 0.2}) == Catch::Approx(1.0 - 100.0 / 120.0).margin(1e-16));
    CHECK(bs_price({0.0, kLn100, kLn120, 0.2}) == 0.0);
    CHECK(bs_price({0.0, 1.0, 1.0, 0.5}) == 0.0);  // ATM payoff is exactly zero
}

// References: 40-digit mpmath evaluation of N(d2) - e^{sigma^2 tau} e^{k-x} N(d1).
TEST_CASE("price matches high-precision references") {
    CHECK(atm_price_of_y(0.2) == Catch::Approx(0.06249025424138624327).epsilon(1e-13));
    CHECK(atm_price_of_y(0.6) == Catch::Approx(0.11826978610387374008).epsilon(1e-13));
    CHECK(atm_price_of_y(6.0) == Catch::Approx(8.633374376844296842e-4).epsilon(1e-12));
    CHECK(bs_price({0.25, kLn120, kLn100, 0.2}) ==
          Catch::Approx(0.15987521632185176904).epsilon(1e-13));
    CHECK(bs_price({0.25, kLn100, kLn120, 0.2}) ==
          Catch::Approx(1.144422151213224938e-3).epsilon(1e-12));
    // ATM with sigma^2 T = 900: the naive e^{sigma^2 T} factor overflows, the
    // scaled-product branch must still produce the right tiny value.
    CHECK(atm_price_of_y(30.0) == Catch::Approx(2.442525672303995595e-51).epsilon(1e-12));
    // Deep ITM: price approaches 1 from below.
    CHECK(bs_price({1.0, 40.0, 0.0, 1.0}) ==
          Catch::Approx(0.99999999999999998845).epsilon(1e-15));
    // Deep OTM: true value ~1.6e-360 underflows double; must be a clean >= 0.
    const double otm = bs_price({1.0, 0.0, 40.0, 1.0});
    CHECK(otm >= 0.0);
    CHECK(otm < 1e-300);
}

TEST_CASE("general formula agrees with the ATM closed form at k = x") {
    for (double T : {1e-4, 1e-2, 0.25, 1.0}) {
        for (double sigma : {0.05, 0.3, 0.9}) {
            CAPTURE(T, sigma);
            CHECK(bs_price({T, kLn100, kLn100, sigma}) ==
                  Catch::Approx(atm_price(T, sigma)).epsilon(1e-13));
        }
    }
}

TEST_CASE("price depends only on (sigma^2 tau, k - x)") {
    const BsPoint base{0.04, 0.1, 0.3, 0.5};
    for (double c : {0.1, 3.0, 25.0}) {
        const BsPoint scaled{base.tau * c * c, base.x, base.k, base.sigma / c};
        CHECK(bs_price(scaled) == Catch::Approx(bs_price(base)).epsilon(1e-13));
    }
}

TEST_CASE("price stays within [0, 1] across the admissible domain") {
    for (double tau : {1e-6, 1e-2, 1.0, 5.0}) {
        for (double w : {-5.0, -1.0, -0.1, 0.0, 0.1, 1.0, 5.0}) {
            for (double sigma : {0.05, 0.3, 1.0, 3.0}) {
                const double p = bs_price({tau, 0.0, w, sigma});
                CAPTURE(tau, w, sigma, p);
                CHECK(p >= 0.0);
                CHECK(p <= 1.0);
            }
        }
    }
}

TEST_CASE("tau -> 0 converges to the payoff") {
    for (double w : {-0.5, -0.18232155679395463, 0.3}) {  // ln(100/120) among them
        const double payoff = std::max(0.0, 1.0 - std::exp(w));
        CHECK(bs_price({1e-10, 0.0, w, 0.2}) == Catch::Approx(payoff).margin(1e-6));
    }
}

TEST_CASE("invalid inputs are rejected") {
    CHECK_THROWS_AS(bs_price({-1e-9, 0.0, 0.0, 0.2}), std::invalid_argument);
    CHECK_THROWS_AS(bs_price({1.0, 0.0, 0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(bs_price({1.0, 0.0, 0.0, -0.3}), std::invalid_argument);
    CHECK_THROWS_AS(bs_price({1.0, std::nan(""), 0.0, 0.2}), std::invalid_argument);
    CHECK_THROWS_AS(atm_vega(0.0, 0.3), std::invalid_argument);
    CHECK_THROWS_AS(atm_vega(0.01, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(atm_dk(-0.01, 0.3), std::invalid_argument);
}

TEST_CASE("atm_vega matches references and finite differences") {
    CHECK(atm_vega(0.01, 0.3) == Catch::Approx(0.03699481400359172405).epsilon(1e-13));
    // y -> 0 limit: sqrt(T)/sqrt(2 pi)
    CHECK(atm_vega(0.01, 1e-9) == Catch::Approx(0.1 * 0.3989422804014326779).epsilon(1e-9));
    for (double T : {1e-3, 0.25}) {
        for (double sigma : {0.1, 0.4, 1.1}) {
            const double h = 1e-6 * sigma;
            const double fd = (atm_price(T, sigma + h) - atm_price(T, sigma - h)) / (2.0 * h);
            CAPTURE(T, sigma);
            CHECK(atm_vega(T, sigma) == Catch::Approx(fd).epsilon(1e-6));
        }
    }
}

TEST_CASE("atm_dk matches references and a finite difference in k") {
    // y = 0.2: equals atm price minus erfc(y/(2 sqrt2))/2
    CHECK(atm_dk(1.0, 0.2) == Catch::Approx(-0.39768190848158477526).epsilon(1e-13));
    CHECK(atm_dk(0.01, 0.3) == Catch::Approx(-0.48248769805720377047).epsilon(1e-13));
    // y -> 0 limit is -1/2; at y = 1e-9 the true value sits ~6e-10 above it
    CHECK(atm_dk(1e-12, 1e-3) == Catch::Approx(-0.5).margin(1e-8));
    // identity with its defining difference form
    for (double y : {0.05, 0.2, 0.6}) {
        const double diff = atm_price_of_y(y) - 0.5 * std::erfc(y / (2.0 * std::sqrt(2.0)));
        CHECK(atm_dk(1.0, y) == Catch::Approx(diff).epsilon(1e-13));
    }
    for (double T : {1e-3, 0.25}) {
        for (double sigma : {0.1, 0.4, 1.1}) {
            const double x = kLn100;
            const double h = 1e-6;
            const double fd =
                (bs_price({T, x, x + h, sigma}) - bs_price({T, x, x - h, sigma})) / (2.0 * h);
            CAPTURE(T, sigma);
            CHECK(atm_dk(T, sigma) == Catch::Approx(fd).epsilon(1e-6));
        }
    }
}

TEST_CASE("sigma-derivative helpers match finite differences") {
    for (double T : {1e-3, 0.04, 0.25}) {
        for (double sigma : {0.1, 0.3, 0.9}) {
            const double h = 1e-6 * sigma;
            const double fd_dk = (atm_dk(T, sigma + h) - atm_dk(T, sigma - h)) / (2.0 * h);
            const double fd_vega = (atm_vega(T, sigma + h) - atm_vega(T, sigma - h)) / (2.0 * h);
            CAPTURE(T, sigma);
            CHECK(atm_dk_dsigma(T, sigma) == Catch::Approx(fd_dk).epsilon(1e-6));
            CHECK(atm_vega_dsigma(T, sigma) == Catch::Approx(fd_vega).epsilon(1e-6));
        }
    }
}

namespace {

// Central finite differences on the pricing function for the identity tests.
double d_t(double t, double x, double k, double sigma, double T) {
    const double h = 3e-6;
    return (bs_price({T - (t + h), x, k, sigma}) - bs_price({T - (t - h), x, k, sigma})) /
           (2.0 * h);
}
double d_x(double t, double x, double k, double sigma, double T) {
    const double h = 3e-6;
    return (bs_price({T - t, x + h, k, sigma}) - bs_price({T - t, x - h, k, sigma})) / (2.0 * h);
}
double d_xx(double t, double x, double k, double sigma, double T) {
    const double h = 2e-4;
    return (bs_price({T - t, x + h, k, sigma}) - 2.0 * bs_price({T - t, x, k, sigma}) +
            bs_price({T - t, x - h, k, sigma})) /
           (h * h);
}
double d_sigma(double t, double x, double k, double sigma, double T) {
    const double h = 3e-6 * sigma;
    return (bs_price({T - t, x, k, sigma + h}) - bs_price({T - t, x, k, sigma - h})) / (2.0 * h);
}

}  // namespace

TEST_CASE("pricing PDE and Gamma-Vega-Delta identity hold under finite differences") {
    const double T = 0.5;
    const double k = kLn100;
    for (double t : {0.0, 0.1, 0.25, 0.4}) {
        for (double dx : {-0.3, -0.1, 0.0, 0.1, 0.3}) {
            for (double sigma : {0.15, 0.3, 0.8, 1.3}) {
                const double x = k + dx;
                const double bt = d_t(t, x, k, sigma, T);
                const double bx = d_x(t, x, k, sigma, T);
                const double bxx = d_xx(t, x, k, sigma, T);
                const double bs = d_sigma(t, x, k, sigma, T);
                CAPTURE(t, dx, sigma);

                const double pde = bt - 0.5 * sigma * sigma * bx + 0.5 * sigma * sigma * bxx;
                CHECK(std::abs(pde) < 1e-5 * std::max(1.0, std::abs(bt)));

                const double lhs = bs / (sigma * (T - t));
                const double rhs = bxx - bx;
                CHECK(std::abs(lhs - rhs) < 1e-5 * std::max({1.0, std::abs(lhs), std::abs(rhs)}));
            }
        }
    }
}
