#pragma once

#include <mpfr.h>

static_assert(sizeof(long) == 8, "kdim assumes an LP64 platform");

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace kdim {

inline constexpr int kMinPrecisionBits = 64;
inline constexpr int kDefaultPrecisionBits = 192;

// A real number carried with a fixed number of mantissa bits. Every
// arithmetic operation is correctly rounded (round-to-nearest) by MPFR.
// Binary operations produce a result at the larger operand precision.
class PrecisionReal {
 public:
  explicit PrecisionReal(int precision_bits = kDefaultPrecisionBits);
  PrecisionReal(std::int64_t value, int precision_bits);
  PrecisionReal(double value, int precision_bits);

  PrecisionReal(const PrecisionReal& other);
  PrecisionReal(PrecisionReal&& other) noexcept;
  PrecisionReal& operator=(const PrecisionReal& other);
  PrecisionReal& operator=(PrecisionReal&& other) noexcept;
  ~PrecisionReal();

  // Parses a decimal literal such as "0.25", "-3", "1e-3".
  static PrecisionReal from_decimal(std::string_view literal, int precision_bits);
  static PrecisionReal pi(int precision_bits);
  static PrecisionReal euler(int precision_bits);
  static PrecisionReal zeta(unsigned long s, int precision_bits);

  int precision_bits() const noexcept;
  bool is_finite() const noexcept;
  bool is_zero() const noexcept;
  int sign() const noexcept;

  double to_double() const noexcept;
  // floor() as an exact integer; requires |value| < 2^62.
  std::int64_t floor_int() const;
  std::string to_string(int digits = 30) const;

  PrecisionReal floor() const;
  // Fractional part in [0, 1).
  PrecisionReal frac() const;
  PrecisionReal abs() const;
  PrecisionReal sqrt() const;
  PrecisionReal reciprocal() const;
  PrecisionReal with_precision(int precision_bits) const;

  PrecisionReal& operator+=(const PrecisionReal& rhs);
  PrecisionReal& operator-=(const PrecisionReal& rhs);
  PrecisionReal& operator*=(const PrecisionReal& rhs);
  PrecisionReal& operator/=(const PrecisionReal& rhs);
  PrecisionReal operator-() const;

  friend PrecisionReal operator+(PrecisionReal lhs, const PrecisionReal& rhs) { return lhs += rhs; }
  friend PrecisionReal operator-(PrecisionReal lhs, const PrecisionReal& rhs) { return lhs -= rhs; }
  friend PrecisionReal operator*(PrecisionReal lhs, const PrecisionReal& rhs) { return lhs *= rhs; }
  friend PrecisionReal operator/(PrecisionReal lhs, const PrecisionReal& rhs) { return lhs /= rhs; }

  friend bool operator==(const PrecisionReal& a, const PrecisionReal& b);
  friend std::partial_ordering operator<=>(const PrecisionReal& a, const PrecisionReal& b);

  mpfr_srcptr raw() const noexcept { return value_; }
  mpfr_ptr raw() noexcept { return value_; }

 private:
  mpfr_t value_;
};

}  // namespace kdim
