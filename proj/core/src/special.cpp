#include "usim/special.hpp"

#include <array>
#include <cmath>

namespace usim {

namespace {

// Rational approximation on the upper half plane: conformal map
// Z = (L+iz)/(L-iz), then a fixed degree polynomial in Z.
constexpr double wz_L = 5.825901260487881;
constexpr std::array<double, 48> wz_a = {
    -3.700743415417188e-17,  3.908097080905041e-17,   8.913045359641251e-17,
    4.336469876763116e-17,   2.10357809007448e-17,    7.068313479639792e-20,
    3.859105048166247e-16,   7.253797548522926e-16,   -1.8792328220691556e-15,
    -5.239158595095343e-15,  9.527536360754516e-15,   4.2342555584235587e-14,
    -3.1933415962846563e-14, -3.227757310972546e-13,  -9.65501738984251e-14,
    2.2154187772000165e-12,  3.4253340904418414e-12,  -1.1935451266839411e-11,
    -4.386586767527037e-11,  2.162200234796574e-11,   3.8794220773032034e-10,
    5.775289855479109e-10,   -2.015659927316155e-09,  -9.596254713078844e-09,
    -6.3868099289015055e-09, 6.927000636026076e-08,   2.654949200687094e-07,
    1.949433746724146e-07,   -1.9445657790098968e-06, -9.475638240450828e-06,
    -1.905446161911202e-05,  1.7506316371117585e-05,  0.0003078691364088904,
    0.0014864991251956183,   0.005125813548225686,    0.014546837792237402,
    0.03586136998337668,     0.07895589553470005,     0.1578633044338047,
    0.2897998907960481,      0.49225702391399057,     0.7780624191484228,
    1.149220464539778,       1.5913084691178003,      2.0707599716742915,
    2.5370484874446904,      2.9304498956237564,      3.194064589395071};
constexpr double inv_sqrt_pi = 0.5641895835477563;

cplx wofz_upper(cplx z) {
  cplx d = wz_L - iu * z;
  cplx Z = (wz_L + iu * z) / d;
  cplx p = wz_a[0];
  for (std::size_t k = 1; k < wz_a.size(); ++k) p = p * Z + wz_a[k];
  return 2.0 * p / (d * d) + inv_sqrt_pi / d;
}

// E_1 by series for small x, modified Lentz continued fraction otherwise.
double expint_1(double x) {
  if (x <= 0.0) throw NumericError("expint_1 needs x > 0");
  if (x <= 1.0) {
    constexpr double euler = 0.5772156649015329;
    double sum = 0.0, term = 1.0;
    for (int k = 1; k <= 40; ++k) {
      term *= -x / k;
      double add = term / k;
      sum += add;
      if (std::abs(add) < 1e-18 * std::abs(sum)) break;
    }
    return -euler - std::log(x) - sum;
  }
  double b = x + 1.0, c = 1e308, d = 1.0 / b, h = d;
  for (int k = 1; k <= 200; ++k) {
    double an = -double(k) * double(k);
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x);
}

}  // namespace

cplx wofz(cplx z) {
  if (z.imag() >= 0.0) return wofz_upper(z);
  // w(z) = 2 e^{-z^2} - w(-z); -z is in the upper half plane
  return 2.0 * std::exp(-z * z) - wofz_upper(-z);
}

double erfcx(double x) {
  if (x >= 0.0) return wofz_upper(cplx(0.0, x)).real();
  return 2.0 * std::exp(x * x) - wofz_upper(cplx(0.0, -x)).real();
}

double expint_n(int n, double x) {
  if (n < 1) throw NumericError("expint_n needs n >= 1");
  double e = expint_1(x);
  double ex = std::exp(-x);
  for (int q = 1; q < n; ++q) e = (ex - x * e) / double(q);
  return e;
}

}  // namespace usim
