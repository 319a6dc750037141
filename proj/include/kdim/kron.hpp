#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "kdim/approx.hpp"
#include "kdim/errors.hpp"
#include "kdim/torus.hpp"

namespace kdim {

// The system |omega q - theta|_m <= epsilon in the integer unknown q. The
// comparison is non-strict throughout.
class KroneckerInstance {
 public:
  KroneckerInstance(FrequencyTuple frequency, TorusPoint target, double epsilon);

  const FrequencyTuple& frequency() const noexcept { return frequency_; }
  const TorusPoint& target() const noexcept { return target_; }
  double epsilon() const noexcept { return epsilon_; }
  const Phase& epsilon_phase() const noexcept { return epsilon_phase_; }
  std::size_t dimension() const noexcept { return frequency_.dimension(); }
  // epsilon >= 1/2: every integer solves.
  bool trivially_solvable() const noexcept;

  // |omega q - theta|_m for a single q.
  Phase residual(std::int64_t q) const;
  bool is_solution(std::int64_t q) const;

 private:
  FrequencyTuple frequency_;
  TorusPoint target_;
  double epsilon_;
  Phase epsilon_phase_;
};

// Smallest q in [a, b] solving the instance, if any.
std::optional<std::int64_t> solve_in_interval(const KroneckerInstance& inst, std::int64_t a,
                                              std::int64_t b, unsigned workers = 0);

// All solutions in [a, b] in increasing order.
std::vector<std::int64_t> scan_solutions(const KroneckerInstance& inst, std::int64_t a,
                                         std::int64_t b, unsigned workers = 0);

struct GapScan {
  KroneckerInstance instance;
  std::int64_t window_lo = 0;
  std::int64_t window_hi = 0;
  std::vector<std::int64_t> solutions;
  std::vector<std::int64_t> gaps;
  // Largest gap between consecutive solutions: the inclusion-length estimate.
  std::int64_t l_hat = 0;
  // Set when an edge run (first solution - a, or b - last solution) exceeds
  // l_hat, i.e. the window may hide a larger gap.
  bool truncated = false;
};

// Raised by gap_scan when the window holds fewer than two solutions.
struct WidenWindowError : InsufficientDataError {
  WidenWindowError(const std::string& what, std::size_t found_count)
      : InsufficientDataError(what), found(found_count) {}
  std::size_t found;
};

GapScan gap_scan(const KroneckerInstance& inst, std::int64_t a, std::int64_t b,
                 unsigned workers = 0);

struct WindowPolicy {
  std::int64_t min_window = 10'000;
  double seed_factor = 50.0;
  // Largest window length the ladder may grow to.
  std::int64_t budget = std::int64_t{1} << 26;
};

struct LadderRow {
  double epsilon = 0.0;
  // Max gap; when the window never held two solutions this is the window
  // length and the row is flagged truncated.
  std::int64_t l_hat = 0;
  std::int64_t window_lo = 0;
  std::int64_t window_hi = 0;
  bool truncated = false;
  std::optional<GapScan> scan;
};

// One gap_scan per epsilon on [0, max(min_window, seed_factor * eps^-m)],
// doubling the window until the scan is untruncated or the budget is hit.
std::vector<LadderRow> inclusion_length_ladder(const FrequencyTuple& omega,
                                               const TorusPoint& theta,
                                               const std::vector<double>& eps_ladder,
                                               const WindowPolicy& policy = {},
                                               unsigned workers = 0);

struct TwoSolutionReport {
  std::size_t pairs_checked = 0;
  std::size_t violations = 0;
  // max over pairs of |omega (q1 - q2)|_m - 2 epsilon
  double worst_excess = 0.0;
};

// Checks |omega (q1 - q2)|_m <= 2 epsilon + 2^-31 over all solution pairs.
TwoSolutionReport check_two_solution_law(const GapScan& scan);

struct AlmostPeriod {
  double target = 0.0;
  std::int64_t tau = 0;
  // Index range [k0, K] of the representation; coefficients[i] is p_{k0+i}.
  std::size_t k0 = 0;
  std::size_t k_top = 0;
  std::vector<std::int64_t> coefficients;
  Phase residual;  // |omega tau|_m
  // False when K is the last index of the sequence, so a_{K+1} is unknown and
  // p_K <= a_{K+1} cannot be checked.
  bool top_bounded = true;
};

// Greedy representation tau = sum_{k=k0..K} p_k q_k of a target A >= q_{k0},
// taking each p_k maximal with the running sum <= A. Targets with
// |A| < q_{k0} give tau = 0 and A <= -q_{k0} gives tau(A) = -tau(-A), with
// the coefficients of -A. k0 is 1-based; throws ValidationError when it is
// out of range.
AlmostPeriod greedy_almost_period(const ConvergentSequence& seq, double A, std::size_t k0);

struct AlmostPeriodQuality {
  std::vector<AlmostPeriod> samples;
  double eta = 0.0;
  double max_residual = 0.0;
  double max_offset = 0.0;  // max |tau - A|
  // max over samples of residual * q_{k0}^eta / k0
  double c2_hat = 0.0;
  // Every tau solves the homogeneous system at epsilon = its residual.
  bool consistent = true;
};

// eta = (1 - nu (m - 1)) / m; requires nu (m - 1) < 1.
AlmostPeriodQuality almost_period_quality(const ConvergentSequence& seq, std::size_t k0,
                                          const std::vector<double>& targets, double nu);

// Extended system [E; A] and (0, ..., 0, theta) for the discrete-to-continuous
// reduction.
struct ExtendedSystem {
  FrequencyMatrix a_hat;
  TorusPoint theta_hat;
  std::size_t n = 0;
  std::size_t m = 0;
};

ExtendedSystem build_extended(const FrequencyMatrix& A, const TorusPoint& theta);

struct IntegerBox {
  std::vector<std::int64_t> lo;
  std::vector<std::int64_t> hi;

  static IntegerBox cube(std::size_t n, std::int64_t lo, std::int64_t hi);
  std::size_t dimension() const noexcept { return lo.size(); }
  // Number of lattice points; saturates at INT64_MAX.
  std::int64_t volume() const;
};

inline constexpr std::int64_t kDefaultBoxBudget = 10'000'000;

// All q in the box with |A q - theta|_m <= epsilon, lexicographically sorted.
std::vector<std::vector<std::int64_t>> matrix_solution_scan(
    const FrequencyMatrix& A, const TorusPoint& theta, double epsilon, const IntegerBox& box,
    std::int64_t budget = kDefaultBoxBudget, unsigned workers = 0);

// Integer points q of the box whose extended residual |A_hat q - theta_hat|_M
// is <= epsilon, evaluated directly in high-precision real arithmetic rather
// than on cached phases.
std::vector<std::vector<std::int64_t>> extended_integer_solutions(
    const ExtendedSystem& ext, double epsilon, const IntegerBox& box,
    std::int64_t budget = kDefaultBoxBudget);

enum class Lattice { integer, real };

// Samples phi(t) = A t mod 1 on the grid t = step * i, i in {0..s-1}^n with
// s^n >= count, in lexicographic order, keeping the first `count` points.
// Integer mode requires a positive integer step.
std::vector<TorusPoint> orbit_sample(const FrequencyMatrix& A, Lattice lattice,
                                     std::int64_t count, const PrecisionReal& step);

// CSV: epsilon,q,gap_to_next
void write_gap_scan_csv(std::ostream& out, const GapScan& scan);
// CSV: epsilon,l_hat,window_lo,window_hi,truncated
void write_ladder_csv(std::ostream& out, const std::vector<LadderRow>& rows);

}  // namespace kdim
