#include "kdim/precision_real.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "kdim/errors.hpp"

namespace kdim {

namespace {

mpfr_prec_t checked_precision(int bits) {
  if (bits < kMinPrecisionBits) {
    throw PrecisionError("precision must be at least " +
                         std::to_string(kMinPrecisionBits) + " bits, got " +
                         std::to_string(bits));
  }
  return static_cast<mpfr_prec_t>(bits);
}

mpfr_prec_t joint_precision(const PrecisionReal& a, const PrecisionReal& b) {
  return static_cast<mpfr_prec_t>(std::max(a.precision_bits(), b.precision_bits()));
}

}  // namespace

PrecisionReal::PrecisionReal(int precision_bits) {
  mpfr_init2(value_, checked_precision(precision_bits));
  mpfr_set_zero(value_, 1);
}

PrecisionReal::PrecisionReal(std::int64_t value, int precision_bits) {
  mpfr_init2(value_, checked_precision(precision_bits));
  mpfr_set_si(value_, static_cast<long>(value), MPFR_RNDN);
}

PrecisionReal::PrecisionReal(double value, int precision_bits) {
  mpfr_init2(value_, checked_precision(precision_bits));
  mpfr_set_d(value_, value, MPFR_RNDN);
}

PrecisionReal::PrecisionReal(const PrecisionReal& other) {
  mpfr_init2(value_, mpfr_get_prec(other.value_));
  mpfr_set(value_, other.value_, MPFR_RNDN);
}

PrecisionReal::PrecisionReal(PrecisionReal&& other) noexcept {
  mpfr_init2(value_, mpfr_get_prec(other.value_));
  mpfr_swap(value_, other.value_);
}

PrecisionReal& PrecisionReal::operator=(const PrecisionReal& other) {
  if (this != &other) {
    mpfr_set_prec(value_, mpfr_get_prec(other.value_));
    mpfr_set(value_, other.value_, MPFR_RNDN);
  }
  return *this;
}

PrecisionReal& PrecisionReal::operator=(PrecisionReal&& other) noexcept {
  mpfr_swap(value_, other.value_);
  return *this;
}

PrecisionReal::~PrecisionReal() { mpfr_clear(value_); }

PrecisionReal PrecisionReal::from_decimal(std::string_view literal, int precision_bits) {
  PrecisionReal out(precision_bits);
  const std::string text(literal);
  if (text.empty() || mpfr_set_str(out.value_, text.c_str(), 10, MPFR_RNDN) != 0) {
    throw ValidationError("malformed decimal literal '" + text + "'");
  }
  return out;
}

PrecisionReal PrecisionReal::pi(int precision_bits) {
  PrecisionReal out(precision_bits);
  mpfr_const_pi(out.value_, MPFR_RNDN);
  return out;
}

PrecisionReal PrecisionReal::euler(int precision_bits) {
  PrecisionReal one(std::int64_t{1}, precision_bits);
  PrecisionReal out(precision_bits);
  mpfr_exp(out.value_, one.value_, MPFR_RNDN);
  return out;
}

PrecisionReal PrecisionReal::zeta(unsigned long s, int precision_bits) {
  if (s < 2) throw ValidationError("zeta(s) requires integer s >= 2");
  PrecisionReal out(precision_bits);
  mpfr_zeta_ui(out.value_, s, MPFR_RNDN);
  return out;
}

int PrecisionReal::precision_bits() const noexcept {
  return static_cast<int>(mpfr_get_prec(value_));
}

bool PrecisionReal::is_finite() const noexcept { return mpfr_number_p(value_) != 0; }
bool PrecisionReal::is_zero() const noexcept { return mpfr_zero_p(value_) != 0; }
int PrecisionReal::sign() const noexcept { return mpfr_sgn(value_); }

double PrecisionReal::to_double() const noexcept { return mpfr_get_d(value_, MPFR_RNDN); }

std::int64_t PrecisionReal::floor_int() const {
  if (!is_finite() || (!is_zero() && mpfr_get_exp(value_) > 62)) {
    throw PrecisionError("value too large for a 64-bit integer floor");
  }
  return static_cast<std::int64_t>(mpfr_get_si(value_, MPFR_RNDD));
}

std::string PrecisionReal::to_string(int digits) const {
  std::vector<char> buf(static_cast<std::size_t>(digits) + 32);
  mpfr_snprintf(buf.data(), buf.size(), "%.*Rg", digits, value_);
  return std::string(buf.data());
}

PrecisionReal PrecisionReal::floor() const {
  PrecisionReal out(precision_bits());
  mpfr_floor(out.value_, value_);
  return out;
}

PrecisionReal PrecisionReal::frac() const {
  // mpfr_frac keeps the sign of the argument; shift negatives into [0, 1).
  PrecisionReal out(precision_bits());
  mpfr_sub(out.value_, value_, floor().value_, MPFR_RNDN);
  return out;
}

PrecisionReal PrecisionReal::abs() const {
  PrecisionReal out(precision_bits());
  mpfr_abs(out.value_, value_, MPFR_RNDN);
  return out;
}

PrecisionReal PrecisionReal::sqrt() const {
  if (sign() < 0) throw ValidationError("sqrt of a negative number");
  PrecisionReal out(precision_bits());
  mpfr_sqrt(out.value_, value_, MPFR_RNDN);
  return out;
}

PrecisionReal PrecisionReal::reciprocal() const {
  if (is_zero()) throw ValidationError("division by zero");
  PrecisionReal out(precision_bits());
  mpfr_ui_div(out.value_, 1, value_, MPFR_RNDN);
  return out;
}

PrecisionReal PrecisionReal::with_precision(int precision_bits) const {
  PrecisionReal out(precision_bits);
  mpfr_set(out.value_, value_, MPFR_RNDN);
  return out;
}

PrecisionReal& PrecisionReal::operator+=(const PrecisionReal& rhs) {
  const auto prec = joint_precision(*this, rhs);
  if (prec != mpfr_get_prec(value_)) mpfr_prec_round(value_, prec, MPFR_RNDN);
  mpfr_add(value_, value_, rhs.value_, MPFR_RNDN);
  return *this;
}

PrecisionReal& PrecisionReal::operator-=(const PrecisionReal& rhs) {
  const auto prec = joint_precision(*this, rhs);
  if (prec != mpfr_get_prec(value_)) mpfr_prec_round(value_, prec, MPFR_RNDN);
  mpfr_sub(value_, value_, rhs.value_, MPFR_RNDN);
  return *this;
}

PrecisionReal& PrecisionReal::operator*=(const PrecisionReal& rhs) {
  const auto prec = joint_precision(*this, rhs);
  if (prec != mpfr_get_prec(value_)) mpfr_prec_round(value_, prec, MPFR_RNDN);
  mpfr_mul(value_, value_, rhs.value_, MPFR_RNDN);
  return *this;
}

PrecisionReal& PrecisionReal::operator/=(const PrecisionReal& rhs) {
  if (rhs.is_zero()) throw ValidationError("division by zero");
  const auto prec = joint_precision(*this, rhs);
  if (prec != mpfr_get_prec(value_)) mpfr_prec_round(value_, prec, MPFR_RNDN);
  mpfr_div(value_, value_, rhs.value_, MPFR_RNDN);
  return *this;
}

PrecisionReal PrecisionReal::operator-() const {
  PrecisionReal out(precision_bits());
  mpfr_neg(out.value_, value_, MPFR_RNDN);
  return out;
}

bool operator==(const PrecisionReal& a, const PrecisionReal& b) {
  return mpfr_equal_p(a.value_, b.value_) != 0;
}

std::partial_ordering operator<=>(const PrecisionReal& a, const PrecisionReal& b) {
  if (mpfr_unordered_p(a.value_, b.value_)) return std::partial_ordering::unordered;
  const int c = mpfr_cmp(a.value_, b.value_);
  if (c < 0) return std::partial_ordering::less;
  if (c > 0) return std::partial_ordering::greater;
  return std::partial_ordering::equivalent;
}

}  // namespace kdim
