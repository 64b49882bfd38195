#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace usim {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double period = two_pi;
inline constexpr cplx iu{0.0, 1.0};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::vector<double> uniform_grid(std::size_t n, double length = period) {
  std::vector<double> x(n);
  for (std::size_t k = 0; k < n; ++k) x[k] = length * double(k) / double(n);
  return x;
}

}  // namespace usim
