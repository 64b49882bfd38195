#pragma once

#include "usim/common.hpp"

namespace usim {

// Faddeeva function w(z) = e^{-z^2} erfc(-iz), rational approximation with
// relative error below 2e-14 for |Re z| <= 12, 0 <= Im z <= 6.
cplx wofz(cplx z);

// Scaled complementary error function e^{x^2} erfc(x).
double erfcx(double x);

// Generalized exponential integral E_n(x), x > 0.
double expint_n(int n, double x);

}  // namespace usim
