#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <utility>
#include <vector>

#include "kdim/torus.hpp"

namespace kdim {

// Above this bound, dirichlet_search for m = 1 reads the answer off the
// continued-fraction convergents instead of scanning.
inline constexpr std::int64_t kContinuedFractionFastPathBound = 1'000'000;

struct DirichletOptions {
  bool allow_fast_path = true;
  unsigned workers = 0;
};

struct DirichletResult {
  std::int64_t q = 0;
  Phase residual;  // |omega q|_m
};

// argmin over 1 <= q <= floor(Q) of |omega q|_m, ties broken by the smallest
// q. Throws ValidationError for Q < 1 and PrecisionError when floor(Q)
// exceeds omega's declared scan bound.
DirichletResult dirichlet_search_full(const FrequencyTuple& omega, double Q,
                                      const DirichletOptions& options = {});
std::int64_t dirichlet_search(const FrequencyTuple& omega, double Q,
                              const DirichletOptions& options = {});

struct ContinuedFraction {
  std::vector<mpz_class> quotients;      // a_0, a_1, ...
  std::vector<mpz_class> numerators;     // p_0, p_1, ...
  std::vector<mpz_class> denominators;   // q_0 = 1, q_1, ...
  bool rational = false;                 // expansion terminated on a zero remainder
};

// Floor recursion x_{k+1} = 1 / (x_k - a_k). Produces a_0..a_terms unless
// the remainder vanishes to within 2^-(P-8) first, in which case the
// expansion stops and is flagged rational. Throws PrecisionError when the
// accumulated rounding error makes further quotients unreliable.
ContinuedFraction continued_fraction(const PrecisionReal& x, int terms);

// Non-decreasing denominators q_1 <= ... <= q_K with the approximation
// certificate |omega q_k|_m <= c_hat * q_{k+1}^(-1/m). Index k maps to
// denominators[k - 1].
struct ConvergentSequence {
  std::shared_ptr<const FrequencyTuple> frequency;
  double beta = 0.0;
  double c_hat = 0.0;
  std::vector<std::int64_t> denominators;
  std::vector<Phase> residuals;
  // a_{k+1} = floor(q_{k+1} / q_k) for k = 1..K-1.
  std::vector<std::int64_t> partial_quotient_bounds;
  // Number of entries lowered by the monotonicity repair sweep.
  int repairs = 0;

  std::size_t size() const noexcept { return denominators.size(); }
  std::int64_t q(std::size_t k) const { return denominators.at(k - 1); }
  std::size_t dimension() const noexcept { return frequency->dimension(); }
  // c_hat * q_{k+1}^(-1/m) for k < K.
  double a1_bound(std::size_t k) const;
};

// Builds q_k from dirichlet_search(omega, beta^k), k = 1..K, then sweeps
// backward setting q_k := q_{k+1} wherever q_{k+1} < q_k. Rejects rational
// or near-rational omega (some residual below 2^-(P-8)) with
// ValidationError.
ConvergentSequence convergent_sequence(const FrequencyTuple& omega, double beta, int K,
                                       const DirichletOptions& options = {});

struct SequenceDiagnostics {
  // Growth: log q_{k+1} ~ log c + exponent * log q_k.
  double growth_exponent = 0.0;
  double growth_log_constant = 0.0;
  // max_k q_{k+1} / q_k^(1 + nu)
  double max_growth_ratio = 0.0;
  // max over N of (sum_{k=N..K} q_k^-eta) * q_N^eta / N, with its argmax.
  double c_eta = 0.0;
  std::size_t c_eta_argmax = 0;
  // Geometric bracket A1 g1^k <= q_k <= A2 g2^k. A2 = 1 and A1 = C_d^(m/(1+nu)),
  // with C_d = min_k |omega q_k|_m q_k^((1+nu)/m) measured on the sequence.
  double measured_cd = 0.0;
  double bracket_a1 = 0.0;
  double bracket_a2 = 1.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
};

SequenceDiagnostics verify_sequence_properties(const ConvergentSequence& seq, double nu,
                                               double eta);

struct DiophantineOrderFit {
  double nu_hat = 0.0;
  double c_d_hat = 0.0;
  // Negated envelope slope, the fitted (1 + nu) / m before clamping nu >= 0.
  double fitted_exponent = 0.0;
  double fit_rms = 0.0;
  // Record-low (q, |omega q|_m) pairs in increasing q.
  std::vector<std::pair<std::int64_t, double>> support;
};

// Scans q = 1..q_max, keeps the record lows and fits (1 + nu)/m by least
// squares on log residual against log q.
DiophantineOrderFit estimate_diophantine_order(const FrequencyTuple& omega, std::int64_t q_max,
                                               unsigned workers = 0);

// CSV: q,residual,is_record for q = 1..q_max.
void write_envelope_csv(std::ostream& out, const FrequencyTuple& omega, std::int64_t q_max);
// CSV: k,q_k,residual_k,a_{k+1},A1_bound
void write_sequence_csv(std::ostream& out, const ConvergentSequence& seq);

}  // namespace kdim
