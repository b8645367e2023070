#pragma once

#include <cmath>

namespace invvol {

// Scaled complementary error function erfcx(z) = exp(z^2) erfc(z).
//
// For z < 8 the direct product is accurate: exp(z*z) carries a relative error
// of ~z^2 ulp, below 1e-14 on that range, and std::erfc is good to a few ulp.
// From z >= 8 the asymptotic expansion
//   erfcx(z) = 1/(z sqrt(pi)) * sum_k (-1)^k (2k-1)!! / (2 z^2)^k
// converges past double precision well before its divergent tail matters.
inline double erfcx(double z) {
    if (z < 8.0) {
        return std::exp(z * z) * std::erfc(z);
    }
    const double inv2z2 = 1.0 / (2.0 * z * z);
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k <= 24; ++k) {
        term *= -(2.0 * k - 1.0) * inv2z2;
        sum += term;
        if (std::abs(term) < 1e-18 * sum) break;
    }
    return sum / (z * 1.7724538509055160273);  // sqrt(pi)
}

// d/dz erfcx(z) = 2 z erfcx(z) - 2/sqrt(pi)
inline double erfcx_prime(double z) {
    return 2.0 * z * erfcx(z) - 1.1283791670955125739;  // 2/sqrt(pi)
}

}  // namespace invvol
