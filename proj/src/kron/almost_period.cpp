#include <algorithm>
#include <cmath>

#include "kdim/format.hpp"
#include "kdim/kron.hpp"

namespace kdim {

AlmostPeriod greedy_almost_period(const ConvergentSequence& seq, double A, std::size_t k0) {
  if (k0 < 1 || k0 > seq.size()) {
    throw ValidationError("k0 = " + std::to_string(k0) + " is outside the sequence 1.." +
                          std::to_string(seq.size()));
  }
  if (!std::isfinite(A)) throw ValidationError("almost-period target must be finite");
  const FrequencyTuple& omega = *seq.frequency;
  if (std::fabs(A) >= 0x1p62 || std::fabs(A) > static_cast<double>(omega.q_max())) {
    throw PrecisionError("target " + format_real(A) + " exceeds the declared scan bound " +
                         std::to_string(omega.q_max()));
  }

  const std::int64_t q_k0 = seq.q(k0);
  AlmostPeriod ap;
  ap.target = A;
  ap.k0 = k0;
  if (std::fabs(A) < static_cast<double>(q_k0)) return ap;
  if (A < 0) {
    AlmostPeriod mirrored = greedy_almost_period(seq, -A, k0);
    mirrored.target = A;
    mirrored.tau = -mirrored.tau;
    return mirrored;
  }

  std::size_t K = k0;
  while (K < seq.size() && static_cast<double>(seq.q(K + 1)) <= A) ++K;
  ap.k_top = K;
  ap.top_bounded = K < seq.size();
  ap.coefficients.assign(K - k0 + 1, 0);

  std::int64_t remaining = static_cast<std::int64_t>(std::floor(A));
  for (std::size_t k = K; k >= k0; --k) {
    const std::int64_t p = remaining / seq.q(k);
    ap.coefficients[k - k0] = p;
    remaining -= p * seq.q(k);
    ap.tau += p * seq.q(k);
  }

  omega.check_multiplier(ap.tau);
  Phase worst;
  for (const auto& w : omega.phases()) worst = std::max(worst, w.times(ap.tau).nearest_int_distance());
  ap.residual = worst;
  return ap;
}

AlmostPeriodQuality almost_period_quality(const ConvergentSequence& seq, std::size_t k0,
                                          const std::vector<double>& targets, double nu) {
  const double m = static_cast<double>(seq.dimension());
  if (!(nu >= 0.0) || !(nu * (m - 1.0) < 1.0)) {
    throw ValidationError("almost_period_quality requires nu >= 0 and nu*(m-1) < 1");
  }
  AlmostPeriodQuality quality;
  quality.eta = (1.0 - nu * (m - 1.0)) / m;
  const auto& phases = seq.frequency->phases();
  const Phase slack = Phase::pow2(kResidualTrustBits);

  for (double A : targets) {
    AlmostPeriod ap = greedy_almost_period(seq, A, k0);
    const double r = ap.residual.to_double();
    quality.max_residual = std::max(quality.max_residual, r);
    quality.max_offset = std::max(quality.max_offset, std::fabs(static_cast<double>(ap.tau) - A));
    quality.c2_hat = std::max(
        quality.c2_hat,
        r * std::pow(static_cast<double>(seq.q(k0)), quality.eta) / static_cast<double>(k0));

    // Rebuild omega tau from the parts sum p_k (omega q_k) and compare.
    Phase rebuilt;
    for (const auto& w : phases) {
      Phase x;
      for (std::size_t i = 0; i < ap.coefficients.size(); ++i) {
        x += w.times(seq.q(k0 + i)).times(ap.coefficients[i]);
      }
      if (ap.tau < 0) x = -x;
      rebuilt = std::max(rebuilt, x.nearest_int_distance());
    }
    const Phase diff = rebuilt >= ap.residual ? rebuilt - ap.residual : ap.residual - rebuilt;
    if (diff > slack) quality.consistent = false;
    quality.samples.push_back(std::move(ap));
  }
  return quality;
}

}  // namespace kdim
