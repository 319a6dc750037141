#include <cmath>

#include "kdim/dim.hpp"
#include "kdim/format.hpp"
#include "kdim/precision_real.hpp"

namespace kdim {

namespace {
constexpr int kBoundBits = 256;
}

double lower_dimension_bound(int n, double d) {
  if (n < 1) throw ValidationError("n must be >= 1");
  if (!std::isfinite(d) || d < 0.0) throw ValidationError("box dimension d must be >= 0");
  const PrecisionReal dn(d, kBoundBits);
  const PrecisionReal nn(std::int64_t{n}, kBoundBits);
  return ((dn - nn) / nn).to_double();
}

double upper_dimension_bound(int m, double nu) {
  if (m < 1) throw ValidationError("m must be >= 1");
  if (!std::isfinite(nu) || nu < 0.0) throw ValidationError("nu must be >= 0");
  // Evaluated at high precision so the double result is the correctly rounded
  // value of the formula at the given inputs (m = 2, nu = 0.2 gives 3 exactly).
  const PrecisionReal one(std::int64_t{1}, kBoundBits);
  const PrecisionReal v(nu, kBoundBits);
  const PrecisionReal mm(std::int64_t{m}, kBoundBits);
  const PrecisionReal guard = v * (mm - one);
  if (!(guard < one)) {
    throw ValidationError("upper bound undefined: requires nu*(m-1) < 1, got nu*(m-1) = " +
                          format_real(guard.to_double()));
  }
  return ((one + v) * mm / (one - guard)).to_double();
}

BoundBracket theoretical_bounds(int m, int n, double nu, double d) {
  if (m < 1 || n < 1) throw ValidationError("m and n must be >= 1");
  if (!(d >= 0.0 && d <= m + n)) {
    throw ValidationError("box dimension d must lie in [0, m+n], got " + format_real(d));
  }
  BoundBracket b;
  b.m = m;
  b.n = n;
  b.nu = nu;
  b.d = d;
  b.upper = upper_dimension_bound(m, nu);
  b.lower = lower_dimension_bound(n, d);
  return b;
}

double holder_bound(double di_base, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw ValidationError("Hoelder exponent must lie in (0, 1], got " + format_real(alpha));
  }
  if (!(di_base >= 0.0)) throw ValidationError("base dimension must be >= 0");
  return di_base / alpha;
}

}  // namespace kdim
