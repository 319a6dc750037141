#include "kdim/torus.hpp"

#include <gmp.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "kdim/errors.hpp"

namespace kdim {

namespace {

using u128 = unsigned __int128;

constexpr int kGuardBits = 64;

std::uint64_t magnitude(std::int64_t q) noexcept {
  return q < 0 ? ~static_cast<std::uint64_t>(q) + 1 : static_cast<std::uint64_t>(q);
}

}  // namespace

// ---------------------------------------------------------------------------
// Phase

Phase Phase::from_real(const PrecisionReal& x) {
  if (!x.is_finite()) throw ValidationError("cannot reduce a non-finite value mod 1");
  mpfr_t scaled;
  mpfr_init2(scaled, std::max<mpfr_prec_t>(x.precision_bits(), kBits + kGuardBits));
  mpfr_set(scaled, x.frac().raw(), MPFR_RNDN);
  mpfr_mul_2ui(scaled, scaled, kBits, MPFR_RNDN);
  mpfr_rint(scaled, scaled, MPFR_RNDN);

  mpz_t integer;
  mpz_init(integer);
  mpfr_get_z(integer, scaled, MPFR_RNDN);
  mpfr_clear(scaled);

  Phase out;
  // Rounding up to exactly 2^256 wraps to zero.
  if (mpz_sizeinbase(integer, 2) <= static_cast<std::size_t>(kBits)) {
    std::size_t count = 0;
    mpz_export(out.limbs_.data(), &count, -1, sizeof(std::uint64_t), 0, 0, integer);
  }
  mpz_clear(integer);
  return out;
}

Phase Phase::from_double(double x) {
  if (!std::isfinite(x)) throw ValidationError("cannot reduce a non-finite value mod 1");
  return from_real(PrecisionReal(x, kMinPrecisionBits));
}

Phase Phase::from_dyadic(std::uint64_t k, int bits) {
  Phase out;
  if (bits <= 0) return out;
  if (bits >= 64) {
    out.limbs_[kLimbs - 1] = k;
  } else {
    out.limbs_[kLimbs - 1] = k << (64 - bits);
  }
  return out;
}

Phase Phase::pow2(int bits) {
  if (bits < 1 || bits > kBits) throw ValidationError("Phase::pow2: bits out of range");
  Phase out;
  const int position = kBits - bits;
  out.limbs_[position / 64] = std::uint64_t{1} << (position % 64);
  return out;
}

Phase& Phase::operator+=(const Phase& rhs) noexcept {
  std::uint64_t carry = 0;
  for (int i = 0; i < kLimbs; ++i) {
    const u128 sum = static_cast<u128>(limbs_[i]) + rhs.limbs_[i] + carry;
    limbs_[i] = static_cast<std::uint64_t>(sum);
    carry = static_cast<std::uint64_t>(sum >> 64);
  }
  return *this;
}

Phase& Phase::operator-=(const Phase& rhs) noexcept {
  std::uint64_t borrow = 0;
  for (int i = 0; i < kLimbs; ++i) {
    const std::uint64_t a = limbs_[i];
    const std::uint64_t b = rhs.limbs_[i];
    const std::uint64_t diff = a - b - borrow;
    borrow = (a < b || (a == b && borrow)) ? 1 : 0;
    limbs_[i] = diff;
  }
  return *this;
}

Phase Phase::operator-() const noexcept { return Phase{} - *this; }

Phase Phase::times(std::int64_t q) const noexcept {
  const std::uint64_t factor = magnitude(q);
  Phase out;
  std::uint64_t carry = 0;
  for (int i = 0; i < kLimbs; ++i) {
    const u128 prod = static_cast<u128>(limbs_[i]) * factor + carry;
    out.limbs_[i] = static_cast<std::uint64_t>(prod);
    carry = static_cast<std::uint64_t>(prod >> 64);
  }
  return q < 0 ? -out : out;
}

Phase Phase::nearest_int_distance() const noexcept {
  return (limbs_[kLimbs - 1] >> 63) != 0 ? -*this : *this;
}

double Phase::to_double() const noexcept {
  return std::ldexp(static_cast<double>(limbs_[kLimbs - 1]), -64) +
         std::ldexp(static_cast<double>(limbs_[kLimbs - 2]), -128);
}

bool Phase::is_zero() const noexcept {
  return std::all_of(limbs_.begin(), limbs_.end(), [](std::uint64_t l) { return l == 0; });
}

std::uint64_t Phase::leading_bits(int bits) const noexcept {
  if (bits <= 0) return 0;
  if (bits >= 64) return limbs_[kLimbs - 1];
  return limbs_[kLimbs - 1] >> (64 - bits);
}

std::strong_ordering operator<=>(const Phase& a, const Phase& b) noexcept {
  for (int i = Phase::kLimbs - 1; i >= 0; --i) {
    if (a.limbs_[i] != b.limbs_[i]) return a.limbs_[i] <=> b.limbs_[i];
  }
  return std::strong_ordering::equal;
}

// ---------------------------------------------------------------------------
// TorusPoint and the metric

TorusPoint TorusPoint::from_doubles(std::span<const double> coords) {
  std::vector<Phase> phases;
  phases.reserve(coords.size());
  for (double c : coords) phases.push_back(Phase::from_double(c));
  return TorusPoint(std::move(phases));
}

TorusPoint TorusPoint::origin(std::size_t dimension) {
  return TorusPoint(std::vector<Phase>(dimension));
}

std::vector<double> TorusPoint::to_doubles() const {
  std::vector<double> out;
  out.reserve(coords_.size());
  for (const auto& c : coords_) out.push_back(c.to_double());
  return out;
}

Phase sup_norm(std::span<const Phase> coords) noexcept {
  Phase best;
  for (const auto& c : coords) best = std::max(best, c.nearest_int_distance());
  return best;
}

Phase torus_dist_exact(const TorusPoint& x, const TorusPoint& y) {
  if (x.dimension() != y.dimension()) {
    throw ValidationError("torus_dist: dimension mismatch (" + std::to_string(x.dimension()) +
                          " vs " + std::to_string(y.dimension()) + ")");
  }
  Phase best;
  for (std::size_t j = 0; j < x.dimension(); ++j) {
    best = std::max(best, (x[j] - y[j]).nearest_int_distance());
  }
  return best;
}

double torus_dist(const TorusPoint& x, const TorusPoint& y) {
  return torus_dist_exact(x, y).to_double();
}

Phase torus_norm_exact(const TorusPoint& theta) { return sup_norm(theta.coords()); }

double torus_norm(const TorusPoint& theta) { return torus_norm_exact(theta).to_double(); }

// ---------------------------------------------------------------------------
// Precision budget

void check_precision_budget(int precision_bits, std::int64_t q_max) {
  if (precision_bits < kMinPrecisionBits || precision_bits > kMaxPrecisionBits) {
    throw PrecisionError("precision must lie in [" + std::to_string(kMinPrecisionBits) + ", " +
                         std::to_string(kMaxPrecisionBits) + "] bits, got " +
                         std::to_string(precision_bits));
  }
  if (q_max < 1) throw ValidationError("declared scan bound q_max must be >= 1");
  if (q_max > max_scan_bound(precision_bits)) {
    throw PrecisionError("scan bound " + std::to_string(q_max) + " needs log2(q_max) + " +
                         std::to_string(kResidualTrustBits) + " <= precision, but precision is " +
                         std::to_string(precision_bits) + " bits");
  }
}

std::int64_t max_scan_bound(int precision_bits) noexcept {
  const int free_bits = precision_bits - kResidualTrustBits;
  if (free_bits >= 63) return std::numeric_limits<std::int64_t>::max();
  if (free_bits < 0) return 0;
  return std::int64_t{1} << free_bits;
}

// ---------------------------------------------------------------------------
// FrequencyTuple

FrequencyTuple::FrequencyTuple(std::vector<PrecisionReal> components, int precision_bits,
                               std::int64_t q_max)
    : components_(std::move(components)), precision_bits_(precision_bits), q_max_(q_max) {
  if (components_.empty()) throw ValidationError("frequency tuple must have m >= 1 components");
  check_precision_budget(precision_bits_, q_max_);
  phases_.reserve(components_.size());
  for (const auto& c : components_) {
    if (!c.is_finite()) throw ValidationError("frequency components must be finite");
    phases_.push_back(Phase::from_real(c));
    descriptors_.push_back(c.to_string(40));
  }
}

FrequencyTuple FrequencyTuple::from_descriptors(std::span<const std::string> descriptors,
                                                int precision_bits, std::int64_t q_max) {
  check_precision_budget(precision_bits, q_max);
  std::vector<PrecisionReal> values;
  values.reserve(descriptors.size());
  for (const auto& d : descriptors) {
    values.push_back(evaluate_descriptor(d, precision_bits + kGuardBits));
  }
  FrequencyTuple out(std::move(values), precision_bits, q_max);
  out.descriptors_.assign(descriptors.begin(), descriptors.end());
  return out;
}

void FrequencyTuple::check_multiplier(std::int64_t q) const {
  if (magnitude(q) > static_cast<std::uint64_t>(q_max_)) {
    throw PrecisionError("multiplier " + std::to_string(q) + " exceeds the declared scan bound " +
                         std::to_string(q_max_));
  }
}

FrequencyTuple FrequencyTuple::with_q_max(std::int64_t q_max) const {
  check_precision_budget(precision_bits_, q_max);
  FrequencyTuple out = *this;
  out.q_max_ = q_max;
  return out;
}

TorusPoint frac_mult(const FrequencyTuple& omega, std::int64_t q) {
  omega.check_multiplier(q);
  std::vector<Phase> coords;
  coords.reserve(omega.dimension());
  for (const auto& p : omega.phases()) coords.push_back(p.times(q));
  return TorusPoint(std::move(coords));
}

// ---------------------------------------------------------------------------
// FrequencyMatrix

FrequencyMatrix::FrequencyMatrix(std::size_t rows, std::size_t cols,
                                 std::vector<PrecisionReal> entries, int precision_bits,
                                 std::int64_t q_max)
    : rows_(rows),
      cols_(cols),
      entries_(std::move(entries)),
      precision_bits_(precision_bits),
      q_max_(q_max) {
  if (rows_ == 0 || cols_ == 0) throw ValidationError("matrix must be at least 1x1");
  if (entries_.size() != rows_ * cols_) {
    throw ValidationError("matrix has " + std::to_string(entries_.size()) + " entries, expected " +
                          std::to_string(rows_ * cols_));
  }
  check_precision_budget(precision_bits_, q_max_);
  phases_.reserve(entries_.size());
  for (const auto& e : entries_) {
    if (!e.is_finite()) throw ValidationError("matrix entries must be finite");
    phases_.push_back(Phase::from_real(e));
  }
}

FrequencyMatrix FrequencyMatrix::from_descriptor(std::string_view text, int precision_bits,
                                                 std::int64_t q_max) {
  check_precision_budget(precision_bits, q_max);
  std::vector<PrecisionReal> entries;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find(';', start), text.size());
    const auto row = split_descriptor_list(text.substr(start, end - start));
    if (rows == 0) cols = row.size();
    if (row.size() != cols || cols == 0) {
      throw ValidationError("matrix descriptor rows must be non-empty and of equal length: '" +
                            std::string(text) + "'");
    }
    for (const auto& e : row) entries.push_back(evaluate_descriptor(e, precision_bits + kGuardBits));
    ++rows;
    start = end + 1;
  }
  return FrequencyMatrix(rows, cols, std::move(entries), precision_bits, q_max);
}

FrequencyMatrix FrequencyMatrix::column(const FrequencyTuple& omega) {
  return FrequencyMatrix(omega.dimension(), 1, omega.components(), omega.precision_bits(),
                         omega.q_max());
}

void FrequencyMatrix::check_multiplier(std::span<const std::int64_t> q) const {
  if (q.size() != cols_) {
    throw ValidationError("integer vector has length " + std::to_string(q.size()) +
                          ", matrix has " + std::to_string(cols_) + " columns");
  }
  std::uint64_t l1 = 0;
  for (auto v : q) {
    l1 += magnitude(v);
    if (l1 > static_cast<std::uint64_t>(q_max_)) {
      throw PrecisionError("integer vector exceeds the declared scan bound " +
                           std::to_string(q_max_));
    }
  }
}

TorusPoint FrequencyMatrix::apply(std::span<const std::int64_t> q) const {
  check_multiplier(q);
  std::vector<Phase> coords(rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) coords[r] += phase(r, c).times(q[c]);
  }
  return TorusPoint(std::move(coords));
}

TorusPoint parse_torus_point(std::string_view text, std::size_t dimension, int precision_bits) {
  const auto parts = split_descriptor_list(text);
  if (parts.size() != 1 && parts.size() != dimension) {
    throw ValidationError("target has " + std::to_string(parts.size()) +
                          " coordinates, expected " + std::to_string(dimension));
  }
  std::vector<Phase> coords;
  coords.reserve(dimension);
  for (std::size_t j = 0; j < dimension; ++j) {
    const auto& d = parts.size() == 1 ? parts[0] : parts[j];
    coords.push_back(Phase::from_real(evaluate_descriptor(d, precision_bits + kGuardBits)));
  }
  return TorusPoint(std::move(coords));
}

}  // namespace kdim
