#pragma once

// Reference computations for the tests. Everything here goes straight to MPFR
// at 512 bits and never touches Phase, so it checks the fixed-point scanners
// independently.

#include <mpfr.h>

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace oracle {

inline constexpr mpfr_prec_t kBits = 512;

class Real {
 public:
  Real() { mpfr_init2(v_, kBits); mpfr_set_zero(v_, 1); }
  Real(const Real& o) { mpfr_init2(v_, kBits); mpfr_set(v_, o.v_, MPFR_RNDN); }
  Real& operator=(const Real& o) { mpfr_set(v_, o.v_, MPFR_RNDN); return *this; }
  ~Real() { mpfr_clear(v_); }
  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

 private:
  mpfr_t v_;
};

// sqrt(n) - k
inline Real sqrt_minus(unsigned long n, long k) {
  Real r;
  mpfr_sqrt_ui(r.get(), n, MPFR_RNDN);
  mpfr_sub_si(r.get(), r.get(), k, MPFR_RNDN);
  return r;
}

// (sqrt(5) - 1) / 2 = golden - 1
inline Real golden_minus_one() {
  Real r = sqrt_minus(5, 1);
  mpfr_div_ui(r.get(), r.get(), 2, MPFR_RNDN);
  return r;
}

inline Real pi_minus_three() {
  Real r;
  mpfr_const_pi(r.get(), MPFR_RNDN);
  mpfr_sub_ui(r.get(), r.get(), 3, MPFR_RNDN);
  return r;
}

inline Real from_double(double x) {
  Real r;
  mpfr_set_d(r.get(), x, MPFR_RNDN);
  return r;
}

// |x|_1: distance from x to the nearest integer.
inline double nearest_int_distance(const Real& x) {
  Real f, one_minus;
  mpfr_frac(f.get(), x.get(), MPFR_RNDN);
  if (mpfr_sgn(f.get()) < 0) mpfr_add_ui(f.get(), f.get(), 1, MPFR_RNDN);
  mpfr_ui_sub(one_minus.get(), 1, f.get(), MPFR_RNDN);
  return std::min(f.to_double(), one_minus.to_double());
}

// max_j |omega_j q - theta_j|_1
inline double residual(const std::vector<Real>& omega, std::int64_t q,
                       const std::vector<Real>& theta) {
  double worst = 0.0;
  for (std::size_t j = 0; j < omega.size(); ++j) {
    Real x;
    mpfr_mul_si(x.get(), omega[j].get(), static_cast<long>(q), MPFR_RNDN);
    if (j < theta.size()) mpfr_sub(x.get(), x.get(), theta[j].get(), MPFR_RNDN);
    worst = std::max(worst, nearest_int_distance(x));
  }
  return worst;
}

inline std::vector<Real> zeros(std::size_t m) { return std::vector<Real>(m); }

// All q in [a, b] with residual <= eps.
inline std::vector<std::int64_t> scan(const std::vector<Real>& omega,
                                      const std::vector<Real>& theta, double eps, std::int64_t a,
                                      std::int64_t b) {
  std::vector<std::int64_t> out;
  for (std::int64_t q = a; q <= b; ++q) {
    if (residual(omega, q, theta) <= eps) out.push_back(q);
  }
  return out;
}

// Smallest-q argmin of |omega q|_m over 1..n.
inline std::int64_t dirichlet(const std::vector<Real>& omega, std::int64_t n) {
  const auto none = zeros(0);
  std::int64_t best = 1;
  double best_r = residual(omega, 1, none);
  for (std::int64_t q = 2; q <= n; ++q) {
    const double r = residual(omega, q, none);
    if (r < best_r) {
      best = q;
      best_r = r;
    }
  }
  return best;
}

// Plain floor recursion a_k = floor(x_k), x_{k+1} = 1 / (x_k - a_k).
inline std::vector<long> partial_quotients(const Real& x, int terms) {
  std::vector<long> out;
  Real y = x;
  for (int i = 0; i <= terms; ++i) {
    Real a;
    mpfr_floor(a.get(), y.get());
    out.push_back(mpfr_get_si(a.get(), MPFR_RNDN));
    mpfr_sub(y.get(), y.get(), a.get(), MPFR_RNDN);
    if (mpfr_zero_p(y.get())) break;
    mpfr_ui_div(y.get(), 1, y.get(), MPFR_RNDN);
  }
  return out;
}

// Fixed-seed generators for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  double unit() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_);
  }
  std::vector<double> unit_vector(std::size_t m) {
    std::vector<double> v(m);
    for (auto& x : v) x = unit();
    return v;
  }
  // sqrt(p) - floor(sqrt(p)) for a non-square p: an irrational in (0, 1).
  std::string irrational_descriptor() {
    static const int kNonSquares[] = {2, 3, 5, 6, 7, 8, 10, 11, 13, 14, 15, 17, 19, 21, 23};
    const int p = kNonSquares[integer(0, 14)];
    int r = 1;
    while ((r + 1) * (r + 1) <= p) ++r;
    return "sqrt(" + std::to_string(p) + ")-" + std::to_string(r);
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace oracle
