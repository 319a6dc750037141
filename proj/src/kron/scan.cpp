#include <algorithm>
#include <cmath>
#include <ostream>

#include "kdim/format.hpp"
#include "kdim/kron.hpp"
#include "kdim/parallel.hpp"

namespace kdim {

KroneckerInstance::KroneckerInstance(FrequencyTuple frequency, TorusPoint target, double epsilon)
    : frequency_(std::move(frequency)), target_(std::move(target)), epsilon_(epsilon) {
  if (!(epsilon_ > 0.0 && epsilon_ <= 0.5)) {
    throw ValidationError("epsilon must lie in (0, 1/2], got " + format_real(epsilon_));
  }
  if (target_.dimension() != frequency_.dimension()) {
    throw ValidationError("target has dimension " + std::to_string(target_.dimension()) +
                          " but the frequency tuple has m = " +
                          std::to_string(frequency_.dimension()));
  }
  epsilon_phase_ = Phase::from_double(epsilon_);
}

bool KroneckerInstance::trivially_solvable() const noexcept { return epsilon_ >= 0.5; }

Phase KroneckerInstance::residual(std::int64_t q) const {
  frequency_.check_multiplier(q);
  Phase worst;
  for (std::size_t j = 0; j < dimension(); ++j) {
    worst = std::max(worst, (frequency_.phases()[j].times(q) - target_[j]).nearest_int_distance());
  }
  return worst;
}

bool KroneckerInstance::is_solution(std::int64_t q) const {
  return trivially_solvable() || residual(q) <= epsilon_phase_;
}

namespace {

void check_window(const KroneckerInstance& inst, std::int64_t a, std::int64_t b) {
  if (a > b) {
    throw ValidationError("window [" + std::to_string(a) + ", " + std::to_string(b) +
                          "] is empty");
  }
  inst.frequency().check_multiplier(a);
  inst.frequency().check_multiplier(b);
}

// Phases omega_j * q - theta_j, advanced by one step per call to advance().
class ResidualWalker {
 public:
  ResidualWalker(const KroneckerInstance& inst, std::int64_t start)
      : step_(inst.frequency().phases()) {
    x_.reserve(step_.size());
    for (std::size_t j = 0; j < step_.size(); ++j) {
      x_.push_back(step_[j].times(start) - inst.target()[j]);
    }
  }

  Phase residual() const noexcept { return sup_norm(x_); }

  void advance() noexcept {
    for (std::size_t j = 0; j < x_.size(); ++j) x_[j] += step_[j];
  }

 private:
  const std::vector<Phase>& step_;
  std::vector<Phase> x_;
};

}  // namespace

std::optional<std::int64_t> solve_in_interval(const KroneckerInstance& inst, std::int64_t a,
                                              std::int64_t b, unsigned workers) {
  check_window(inst, a, b);
  if (inst.trivially_solvable()) return a;
  // Blocks are scanned in order so the first hit is the smallest solution.
  constexpr std::int64_t kBlock = std::int64_t{1} << 22;
  for (std::int64_t lo = a;; lo += kBlock) {
    const std::int64_t hi = (b - lo < kBlock) ? b : lo + kBlock - 1;
    auto firsts = map_chunks<std::optional<std::int64_t>>(
        lo, hi, workers, [&](IndexRange range) -> std::optional<std::int64_t> {
          ResidualWalker walk(inst, range.lo);
          for (std::int64_t q = range.lo; q <= range.hi; ++q) {
            if (walk.residual() <= inst.epsilon_phase()) return q;
            walk.advance();
          }
          return std::nullopt;
        });
    for (const auto& f : firsts) {
      if (f) return f;
    }
    if (hi == b) return std::nullopt;
  }
}

std::vector<std::int64_t> scan_solutions(const KroneckerInstance& inst, std::int64_t a,
                                         std::int64_t b, unsigned workers) {
  check_window(inst, a, b);
  std::vector<std::int64_t> out;
  if (inst.trivially_solvable()) {
    out.resize(static_cast<std::size_t>(b - a + 1));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a + static_cast<std::int64_t>(i);
    return out;
  }
  const auto parts = map_chunks<std::vector<std::int64_t>>(a, b, workers, [&](IndexRange range) {
    std::vector<std::int64_t> hits;
    ResidualWalker walk(inst, range.lo);
    for (std::int64_t q = range.lo; q <= range.hi; ++q) {
      if (walk.residual() <= inst.epsilon_phase()) hits.push_back(q);
      walk.advance();
    }
    return hits;
  });
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

GapScan gap_scan(const KroneckerInstance& inst, std::int64_t a, std::int64_t b,
                 unsigned workers) {
  GapScan scan{inst, a, b, scan_solutions(inst, a, b, workers), {}, 0, false};
  if (scan.solutions.size() < 2) {
    throw WidenWindowError("gap_scan: window [" + std::to_string(a) + ", " + std::to_string(b) +
                               "] holds " + std::to_string(scan.solutions.size()) +
                               " solution(s); widen the window",
                           scan.solutions.size());
  }
  scan.gaps.reserve(scan.solutions.size() - 1);
  for (std::size_t i = 1; i < scan.solutions.size(); ++i) {
    scan.gaps.push_back(scan.solutions[i] - scan.solutions[i - 1]);
  }
  scan.l_hat = *std::max_element(scan.gaps.begin(), scan.gaps.end());
  scan.truncated = (scan.solutions.front() - a) > scan.l_hat || (b - scan.solutions.back()) > scan.l_hat;
  return scan;
}

std::vector<LadderRow> inclusion_length_ladder(const FrequencyTuple& omega,
                                               const TorusPoint& theta,
                                               const std::vector<double>& eps_ladder,
                                               const WindowPolicy& policy, unsigned workers) {
  if (eps_ladder.empty()) throw ValidationError("epsilon ladder is empty");
  for (std::size_t i = 0; i < eps_ladder.size(); ++i) {
    if (!(eps_ladder[i] > 0.0 && eps_ladder[i] <= 0.5)) {
      throw ValidationError("ladder epsilon must lie in (0, 1/2], got " +
                            format_real(eps_ladder[i]));
    }
    if (i > 0 && !(eps_ladder[i] < eps_ladder[i - 1])) {
      throw ValidationError("epsilon ladder must be strictly decreasing");
    }
  }
  if (policy.budget < 1 || policy.min_window < 1) {
    throw ValidationError("window policy needs positive min_window and budget");
  }
  const FrequencyTuple scoped =
      omega.q_max() >= policy.budget ? omega : omega.with_q_max(policy.budget);
  const double m = static_cast<double>(omega.dimension());

  std::vector<LadderRow> rows;
  for (double eps : eps_ladder) {
    const KroneckerInstance inst(scoped, theta, eps);
    const double seed = std::ceil(policy.seed_factor * std::pow(1.0 / eps, m));
    std::int64_t hi = policy.min_window;
    if (seed > static_cast<double>(hi)) {
      hi = seed >= static_cast<double>(policy.budget) ? policy.budget : static_cast<std::int64_t>(seed);
    }
    hi = std::min(hi, policy.budget);

    LadderRow row;
    row.epsilon = eps;
    for (;;) {
      row.window_lo = 0;
      row.window_hi = hi;
      try {
        GapScan scan = gap_scan(inst, 0, hi, workers);
        row.l_hat = scan.l_hat;
        row.truncated = scan.truncated;
        row.scan = std::move(scan);
      } catch (const WidenWindowError&) {
        row.l_hat = hi;
        row.truncated = true;
        row.scan.reset();
      }
      if (!row.truncated || hi >= policy.budget) break;
      hi = (hi > policy.budget / 2) ? policy.budget : hi * 2;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

TwoSolutionReport check_two_solution_law(const GapScan& scan) {
  const auto& inst = scan.instance;
  const Phase eps = inst.epsilon_phase();
  const Phase bound = eps + eps + Phase::pow2(31);
  const auto& omega = inst.frequency().phases();
  TwoSolutionReport report;
  report.worst_excess = -2.0 * inst.epsilon();
  const auto& sols = scan.solutions;
  for (std::size_t i = 0; i < sols.size(); ++i) {
    for (std::size_t j = i + 1; j < sols.size(); ++j) {
      const std::int64_t d = sols[j] - sols[i];
      Phase r;
      for (const auto& w : omega) r = std::max(r, w.times(d).nearest_int_distance());
      ++report.pairs_checked;
      if (r > bound) ++report.violations;
      report.worst_excess = std::max(report.worst_excess, r.to_double() - 2.0 * inst.epsilon());
    }
  }
  return report;
}

void write_gap_scan_csv(std::ostream& out, const GapScan& scan) {
  out << "epsilon,q,gap_to_next\n";
  const std::string eps = format_real(scan.instance.epsilon());
  for (std::size_t i = 0; i < scan.solutions.size(); ++i) {
    out << eps << ',' << scan.solutions[i] << ',';
    if (i < scan.gaps.size()) out << scan.gaps[i];
    out << '\n';
  }
}

void write_ladder_csv(std::ostream& out, const std::vector<LadderRow>& rows) {
  out << "epsilon,l_hat,window_lo,window_hi,truncated\n";
  for (const auto& r : rows) {
    out << format_real(r.epsilon) << ',' << r.l_hat << ',' << r.window_lo << ',' << r.window_hi
        << ',' << (r.truncated ? 1 : 0) << '\n';
  }
}

}  // namespace kdim
