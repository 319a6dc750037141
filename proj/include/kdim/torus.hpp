#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kdim/precision_real.hpp"

namespace kdim {

inline constexpr int kMaxPrecisionBits = 256;
// Residuals are trusted to 2^-kResidualTrustBits.
inline constexpr int kResidualTrustBits = 32;

// An element of R/Z stored as a 256-bit binary fraction. Addition, negation
// and multiplication by an integer are exact modulo 1, so q*omega mod 1 is
// computed without accumulating rounding error beyond the representation
// error of omega itself.
class Phase {
 public:
  static constexpr int kLimbs = 4;
  static constexpr int kBits = 64 * kLimbs;

  constexpr Phase() = default;

  // Fractional part of x rounded to the nearest multiple of 2^-256.
  static Phase from_real(const PrecisionReal& x);
  // Fractional part of x; exact for every finite double.
  static Phase from_double(double x);
  // The phase k / 2^bits, for 0 <= bits <= 64.
  static Phase from_dyadic(std::uint64_t k, int bits);
  // 2^-bits for 1 <= bits <= 256.
  static Phase pow2(int bits);

  Phase& operator+=(const Phase& rhs) noexcept;
  Phase& operator-=(const Phase& rhs) noexcept;
  friend Phase operator+(Phase a, const Phase& b) noexcept { return a += b; }
  friend Phase operator-(Phase a, const Phase& b) noexcept { return a -= b; }
  Phase operator-() const noexcept;

  // q * x mod 1 (exact on the stored representation).
  Phase times(std::int64_t q) const noexcept;

  // |x|_1: the distance to the nearest integer, a phase in [0, 1/2].
  Phase nearest_int_distance() const noexcept;

  double to_double() const noexcept;
  bool is_zero() const noexcept;
  // floor(x * 2^bits) for 0 <= bits <= 64: the index of the dyadic cell
  // containing x.
  std::uint64_t leading_bits(int bits) const noexcept;

  friend bool operator==(const Phase&, const Phase&) = default;
  friend std::strong_ordering operator<=>(const Phase& a, const Phase& b) noexcept;

  // Limbs are little-endian: limbs()[kLimbs - 1] holds the most significant bits.
  const std::array<std::uint64_t, kLimbs>& limbs() const noexcept { return limbs_; }

 private:
  std::array<std::uint64_t, kLimbs> limbs_{};
};

// A point of the flat torus T^m = R^m / Z^m.
class TorusPoint {
 public:
  TorusPoint() = default;
  explicit TorusPoint(std::vector<Phase> coords) : coords_(std::move(coords)) {}
  // Reduces each coordinate mod 1.
  static TorusPoint from_doubles(std::span<const double> coords);
  static TorusPoint origin(std::size_t dimension);

  std::size_t dimension() const noexcept { return coords_.size(); }
  const std::vector<Phase>& coords() const noexcept { return coords_; }
  const Phase& operator[](std::size_t j) const { return coords_[j]; }
  // Coordinate j as a double in [0, 1).
  double coord(std::size_t j) const { return coords_[j].to_double(); }
  std::vector<double> to_doubles() const;

  friend bool operator==(const TorusPoint&, const TorusPoint&) = default;

 private:
  std::vector<Phase> coords_;
};

// Sup-norm nearest-integer distance max_j |x_j - y_j|_1, exact on the
// stored phases. Throws ValidationError on dimension mismatch.
Phase torus_dist_exact(const TorusPoint& x, const TorusPoint& y);
double torus_dist(const TorusPoint& x, const TorusPoint& y);

// |theta|_m, the sup-norm distance from theta to Z^m.
Phase torus_norm_exact(const TorusPoint& theta);
double torus_norm(const TorusPoint& theta);

// Sup over coordinates of |x_j|_1 for a bare phase vector.
Phase sup_norm(std::span<const Phase> coords) noexcept;

// Checks P >= 64, P <= 256 and log2(q_max) + 32 <= P. Throws PrecisionError.
void check_precision_budget(int precision_bits, std::int64_t q_max);
// Largest scan bound allowed at the given precision.
std::int64_t max_scan_bound(int precision_bits) noexcept;

// The m-tuple omega of frequencies. Values are evaluated once at
// construction with 64 guard bits beyond the precision budget, and their
// fractional parts are cached as phases for exact integer scanning.
class FrequencyTuple {
 public:
  FrequencyTuple(std::vector<PrecisionReal> components, int precision_bits,
                 std::int64_t q_max);

  // Builds omega from descriptor strings such as "golden-1" or "sqrt(2)-1".
  static FrequencyTuple from_descriptors(std::span<const std::string> descriptors,
                                         int precision_bits = kDefaultPrecisionBits,
                                         std::int64_t q_max = std::int64_t{1} << 40);

  std::size_t dimension() const noexcept { return components_.size(); }
  int precision_bits() const noexcept { return precision_bits_; }
  std::int64_t q_max() const noexcept { return q_max_; }
  const std::vector<PrecisionReal>& components() const noexcept { return components_; }
  const std::vector<Phase>& phases() const noexcept { return phases_; }
  const std::vector<std::string>& descriptors() const noexcept { return descriptors_; }

  // Throws PrecisionError when |q| exceeds the declared scan bound.
  void check_multiplier(std::int64_t q) const;
  // Copy with a different declared scan bound (re-validated).
  FrequencyTuple with_q_max(std::int64_t q_max) const;

 private:
  std::vector<PrecisionReal> components_;
  std::vector<Phase> phases_;
  std::vector<std::string> descriptors_;
  int precision_bits_;
  std::int64_t q_max_;
};

// omega * q reduced to T^m. Throws PrecisionError when |q| > q_max.
TorusPoint frac_mult(const FrequencyTuple& omega, std::int64_t q);

// Real m x n matrix with cached fractional parts of its entries; entries are
// row-major. q_max bounds the l1 norm of the integer vectors it is applied to.
class FrequencyMatrix {
 public:
  FrequencyMatrix(std::size_t rows, std::size_t cols, std::vector<PrecisionReal> entries,
                  int precision_bits, std::int64_t q_max);

  // "1,0;0,sqrt(2)": rows separated by ';', entries by ','.
  static FrequencyMatrix from_descriptor(std::string_view text,
                                         int precision_bits = kDefaultPrecisionBits,
                                         std::int64_t q_max = std::int64_t{1} << 40);
  // The column matrix (omega_1; ...; omega_m).
  static FrequencyMatrix column(const FrequencyTuple& omega);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  int precision_bits() const noexcept { return precision_bits_; }
  std::int64_t q_max() const noexcept { return q_max_; }
  const PrecisionReal& entry(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }
  const Phase& phase(std::size_t r, std::size_t c) const { return phases_[r * cols_ + c]; }
  const std::vector<PrecisionReal>& entries() const noexcept { return entries_; }

  // A q mod Z^m for an integer vector q of length cols().
  TorusPoint apply(std::span<const std::int64_t> q) const;
  void check_multiplier(std::span<const std::int64_t> q) const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<PrecisionReal> entries_;
  std::vector<Phase> phases_;
  int precision_bits_;
  std::int64_t q_max_;
};

// Frequency descriptor grammar:
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := '-' unary | atom
//   atom   := decimal | 'golden' | 'pi' | 'e' | 'sqrt(' expr ')'
//           | 'zeta(' integer ')' | '(' expr ')'
// Throws ValidationError on malformed input.
PrecisionReal evaluate_descriptor(std::string_view text, int precision_bits);

// Splits "sqrt(2)-1,sqrt(3)-1" at commas outside parentheses.
std::vector<std::string> split_descriptor_list(std::string_view text);

// Target point from a descriptor list; "0" is broadcast to the origin of
// the requested dimension.
TorusPoint parse_torus_point(std::string_view text, std::size_t dimension,
                             int precision_bits = kDefaultPrecisionBits);

}  // namespace kdim
