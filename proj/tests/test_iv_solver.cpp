#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "invvol/errors.hpp"
#include "invvol/inverse_bs.hpp"
#include "invvol/iv_solver.hpp"
#include "invvol/roots.hpp"

using namespace invvol;

TEST_CASE("brent finds simple roots and reports failures") {
    auto cubic = [](double x) { return x * x * x - 2.0 * x - 5.0; };
    const BrentResult r = brent(cubic, 2.0, 3.0, 1e-14, 0.0, 100);
    REQUIRE(r.converged);
    CHECK(r.root == Catch::Approx(2.0945514815423265).epsilon(1e-13));

    // exact endpoint root short-circuits
    auto lin = [](double x) { return x - 1.0; };
    CHECK(brent(lin, 1.0, 2.0, 1e-12, 0.0, 50).root == 1.0);

    // no sign change -> bracketing error
    auto pos = [](double x) { return x * x + 1.0; };
    REQUIRE_THROWS_AS(brent(pos, -1.0, 1.0, 1e-12, 0.0, 50),
                      std::invalid_argument);

    // starved iteration budget -> converged=false, no throw
    auto flat = [](double x) { return std::atan(1e6 * (x - 0.123456789)); };
    const BrentResult s = brent(flat, 0.0, 1.0, 1e-300, 0.0, 3);
    CHECK_FALSE(s.converged);
}

TEST_CASE("turning point of the ATM price curve") {
    const double y_star = turning_point();
    CHECK(y_star == Catch::Approx(0.9162692334837254).epsilon(1e-13));

    // vega changes sign across the peak
    CHECK(atm_vega_of_y(0.9) ==
          Catch::Approx(0.002402884955356136).epsilon(1e-12));
    CHECK(atm_vega_of_y(1.0) ==
          Catch::Approx(-0.011136275674386423).epsilon(1e-12));

    // peak price and the safety-capped price
    CHECK(atm_price_of_y(y_star) ==
          Catch::Approx(0.12741683452184037).epsilon(1e-13));
    CHECK(max_invertible_price() ==
          Catch::Approx(0.12725946679413137).epsilon(1e-13));
    CHECK(max_invertible_price() < atm_price_of_y(y_star));
}

TEST_CASE("implied vol round-trips the ATM price") {
    const double y_star = turning_point();
    const std::vector<double> ys = {1e-3, 1e-2, 0.1, 0.3,
                                    0.5,  0.7, 0.8 * y_star};
    const std::vector<double> Ts = {1e-4, 1e-3, 1e-2, 0.25, 1.0};
    for (double T : Ts) {
        for (double y : ys) {
            const double sigma = y / std::sqrt(T);
            const double price = atm_price(T, sigma);
            const double iv = implied_vol_atm(price, T);
            INFO("T=" << T << " y=" << y);
            CHECK(std::fabs(iv - sigma) / sigma < 1e-10);
        }
    }
}

TEST_CASE("implied vol recovers a frozen reference price") {
    // price at y = 0.8 * y_peak, maturity 1 -> sigma = y directly
    const double price = 0.12463642658333596;
    const double iv = implied_vol_atm(price, 1.0);
    CHECK(iv == Catch::Approx(0.8 * turning_point()).epsilon(1e-10));
}

TEST_CASE("implied vol is monotone in price") {
    const double T = 0.01;
    double prev = 0.0;
    for (double p = 0.001; p < 0.12; p += 0.004) {
        const double iv = implied_vol_atm(p, T);
        CHECK(iv > prev);
        prev = iv;
    }
}

TEST_CASE("tiny prices extend the lower bracket instead of failing") {
    const double T = 1e-4;
    const double price = 1e-10;
    const double iv = implied_vol_atm(price, T);
    // slope of m at 0 is 1/sqrt(2*pi): sigma ~ price * sqrt(2*pi) / sqrt(T)
    const double approx = price * std::sqrt(2.0 * M_PI) / std::sqrt(T);
    CHECK(std::fabs(iv - approx) < 1e-11);
    CHECK(atm_price(T, iv) == Catch::Approx(price).epsilon(1e-3));
}

TEST_CASE("out-of-range prices raise DomainError") {
    CHECK_THROWS_AS(implied_vol_atm(0.0, 0.25), DomainError);
    CHECK_THROWS_AS(implied_vol_atm(-0.01, 0.25), DomainError);
    CHECK_THROWS_AS(implied_vol_atm(max_invertible_price(), 0.25), DomainError);
    CHECK_THROWS_AS(implied_vol_atm(0.13, 0.25), DomainError);
    CHECK_THROWS_AS(implied_vol_atm(0.5, 0.25), DomainError);
    CHECK_THROWS_AS(implied_vol_atm(0.05, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(implied_vol_atm(0.05, -1.0), std::invalid_argument);
}
