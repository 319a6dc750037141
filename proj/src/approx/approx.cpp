#include "kdim/approx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>

#include "kdim/errors.hpp"
#include "kdim/fit.hpp"
#include "kdim/format.hpp"
#include "kdim/parallel.hpp"

namespace kdim {

namespace {

// A quotient is only trusted while the running error bound on the
// remainder stays below this.
constexpr double kQuotientErrorCeiling = 0x1p-32;

// Residuals below 2^-(P-8) are indistinguishable from an exact rational hit.
Phase rational_threshold(int precision_bits) { return Phase::pow2(precision_bits - 8); }

std::int64_t floor_bound(double Q) {
  if (!(Q >= 1.0)) throw ValidationError("dirichlet_search: Q must be >= 1, got " + format_real(Q));
  if (Q >= 0x1p63) throw PrecisionError("dirichlet_search: Q exceeds the 64-bit scan range");
  return static_cast<std::int64_t>(std::floor(Q));
}

DirichletResult brute_force_argmin(const FrequencyTuple& omega, std::int64_t n, unsigned workers) {
  const auto& step = omega.phases();
  auto chunk_best = [&](IndexRange range) {
    std::vector<Phase> x;
    x.reserve(step.size());
    for (const auto& p : step) x.push_back(p.times(range.lo));
    DirichletResult best{0, Phase::pow2(1)};
    bool first = true;
    for (std::int64_t q = range.lo; q <= range.hi; ++q) {
      const Phase r = sup_norm(x);
      if (first || r < best.residual) {
        best = {q, r};
        first = false;
      }
      for (std::size_t j = 0; j < x.size(); ++j) x[j] += step[j];
    }
    return best;
  };
  const auto parts = map_chunks<DirichletResult>(1, n, workers, chunk_best);
  DirichletResult best = parts.front();
  for (const auto& p : parts) {
    if (p.residual < best.residual) best = p;
  }
  return best;
}

struct Expansion {
  ContinuedFraction cf;
  bool exhausted = false;
};

// Shared floor recursion. Stops after `terms` quotients, on a rational
// remainder, once a denominator exceeds `stop_denominator` (when given),
// or when the precision runs out.
Expansion expand(const PrecisionReal& x, int terms, std::optional<std::int64_t> stop_denominator) {
  if (!x.is_finite()) throw ValidationError("continued_fraction: value must be finite");
  if (terms < 0) throw ValidationError("continued_fraction: term count must be >= 0");
  const int bits = x.precision_bits();
  const double rational_tol = std::ldexp(1.0, -(bits - 8));

  Expansion out;
  auto& cf = out.cf;
  PrecisionReal xk = x;
  double err = std::ldexp(std::max(1.0, std::fabs(x.to_double())), -bits);
  mpz_class p_prev = 1, p_prev2 = 0;
  mpz_class q_prev = 0, q_prev2 = 1;

  PrecisionReal nearest(bits);
  for (int k = 0; k <= terms; ++k) {
    if (err > kQuotientErrorCeiling) {
      out.exhausted = true;
      return out;
    }
    mpfr_round(nearest.raw(), xk.raw());
    const double dist = (xk - nearest).abs().to_double();
    const bool is_last = dist <= std::max(rational_tol, 256.0 * err);
    const PrecisionReal quotient = is_last ? nearest : xk.floor();

    mpz_class a;
    mpfr_get_z(a.get_mpz_t(), quotient.raw(), MPFR_RNDN);
    const mpz_class p = a * p_prev + p_prev2;
    const mpz_class q = a * q_prev + q_prev2;
    cf.quotients.push_back(a);
    cf.numerators.push_back(p);
    cf.denominators.push_back(q);
    p_prev2 = p_prev;
    p_prev = p;
    q_prev2 = q_prev;
    q_prev = q;

    if (is_last) {
      cf.rational = true;
      return out;
    }
    if (stop_denominator && q > *stop_denominator) return out;

    const PrecisionReal remainder = xk - quotient;
    const double r = remainder.to_double();
    xk = remainder.reciprocal();
    err = err / (r * r) + std::ldexp(std::fabs(xk.to_double()), -bits);
  }
  return out;
}

std::optional<DirichletResult> continued_fraction_argmin(const FrequencyTuple& omega,
                                                          std::int64_t n) {
  const Expansion e = expand(omega.components()[0], std::numeric_limits<int>::max() - 1, n);
  if (e.exhausted || e.cf.rational) return std::nullopt;
  const auto& qs = e.cf.denominators;
  if (qs.empty() || qs.back() <= n) return std::nullopt;
  std::int64_t best = 1;
  for (const auto& q : qs) {
    if (q <= n) best = std::max<std::int64_t>(best, q.get_si());
  }
  return DirichletResult{best, sup_norm(frac_mult(omega, best).coords())};
}

}  // namespace

DirichletResult dirichlet_search_full(const FrequencyTuple& omega, double Q,
                                      const DirichletOptions& options) {
  const std::int64_t n = floor_bound(Q);
  omega.check_multiplier(n);
  if (options.allow_fast_path && omega.dimension() == 1 && n > kContinuedFractionFastPathBound) {
    if (auto fast = continued_fraction_argmin(omega, n)) return *fast;
  }
  return brute_force_argmin(omega, n, options.workers);
}

std::int64_t dirichlet_search(const FrequencyTuple& omega, double Q,
                              const DirichletOptions& options) {
  return dirichlet_search_full(omega, Q, options).q;
}

ContinuedFraction continued_fraction(const PrecisionReal& x, int terms) {
  Expansion e = expand(x, terms, std::nullopt);
  if (e.exhausted) {
    throw PrecisionError("continued_fraction: precision exhausted after " +
                         std::to_string(e.cf.quotients.size()) + " of " +
                         std::to_string(terms + 1) + " quotients at " +
                         std::to_string(x.precision_bits()) + " bits");
  }
  return std::move(e.cf);
}

double ConvergentSequence::a1_bound(std::size_t k) const {
  const double m = static_cast<double>(dimension());
  return c_hat * std::pow(static_cast<double>(q(k + 1)), -1.0 / m);
}

ConvergentSequence convergent_sequence(const FrequencyTuple& omega, double beta, int K,
                                       const DirichletOptions& options) {
  if (!(beta > 1.0) || !std::isfinite(beta)) {
    throw ValidationError("convergent_sequence: beta must be > 1, got " + format_real(beta));
  }
  if (K < 1) throw ValidationError("convergent_sequence: K must be >= 1");

  ConvergentSequence seq;
  seq.frequency = std::make_shared<const FrequencyTuple>(omega);
  seq.beta = beta;
  const double m = static_cast<double>(omega.dimension());
  seq.c_hat = std::pow(beta, 1.0 / m);

  const PrecisionReal b(beta, 128);
  PrecisionReal level(std::int64_t{1}, 128);
  for (int k = 1; k <= K; ++k) {
    level *= b;
    if (level >= PrecisionReal(0x1p62, 128)) {
      throw PrecisionError("convergent_sequence: beta^" + std::to_string(k) +
                           " exceeds the 64-bit scan range");
    }
    const std::int64_t n = level.floor_int();
    const DirichletResult r = dirichlet_search_full(omega, static_cast<double>(n), options);
    seq.denominators.push_back(r.q);
    seq.residuals.push_back(r.residual);
  }

  const Phase degenerate = rational_threshold(omega.precision_bits());
  for (std::size_t i = 0; i < seq.residuals.size(); ++i) {
    if (seq.residuals[i] < degenerate) {
      throw ValidationError("convergent_sequence: frequency is rational or near-rational (|omega q|_m = " +
                            format_real(seq.residuals[i].to_double()) + " at q = " +
                            std::to_string(seq.denominators[i]) +
                            "); the construction needs an irrational coordinate");
    }
  }

  for (std::size_t i = seq.denominators.size(); i-- > 1;) {
    if (seq.denominators[i] < seq.denominators[i - 1]) {
      seq.denominators[i - 1] = seq.denominators[i];
      seq.residuals[i - 1] = seq.residuals[i];
      ++seq.repairs;
    }
  }

  for (std::size_t i = 0; i + 1 < seq.denominators.size(); ++i) {
    seq.partial_quotient_bounds.push_back(seq.denominators[i + 1] / seq.denominators[i]);
  }

  for (std::size_t k = 1; k < seq.size(); ++k) {
    const double residual = seq.residuals[k - 1].to_double();
    if (!(residual <= seq.a1_bound(k) + 0x1p-32)) {
      throw std::logic_error("convergent_sequence: approximation certificate fails at k = " +
                             std::to_string(k));
    }
  }
  return seq;
}

SequenceDiagnostics verify_sequence_properties(const ConvergentSequence& seq, double nu,
                                               double eta) {
  if (seq.size() < 3) throw ValidationError("verify_sequence_properties: need at least 3 terms");
  if (!(nu >= 0.0)) throw ValidationError("verify_sequence_properties: nu must be >= 0");
  if (!(eta > 0.0)) throw ValidationError("verify_sequence_properties: eta must be > 0");

  SequenceDiagnostics d;
  const std::size_t K = seq.size();
  const double m = static_cast<double>(seq.dimension());

  std::vector<double> log_q, log_next;
  for (std::size_t k = 1; k < K; ++k) {
    const double qk = static_cast<double>(seq.q(k));
    const double qn = static_cast<double>(seq.q(k + 1));
    log_q.push_back(std::log(qk));
    log_next.push_back(std::log(qn));
    d.max_growth_ratio = std::max(d.max_growth_ratio, qn / std::pow(qk, 1.0 + nu));
  }
  try {
    const LinearFit fit = least_squares(log_q, log_next);
    d.growth_exponent = fit.slope;
    d.growth_log_constant = fit.intercept;
  } catch (const InsufficientDataError&) {
    d.growth_exponent = std::numeric_limits<double>::quiet_NaN();
    d.growth_log_constant = std::numeric_limits<double>::quiet_NaN();
  }

  // Tail sums from the end so each N costs O(1).
  std::vector<double> tail(K + 2, 0.0);
  for (std::size_t k = K; k >= 1; --k) {
    tail[k] = tail[k + 1] + std::pow(static_cast<double>(seq.q(k)), -eta);
  }
  for (std::size_t N = 1; N <= K; ++N) {
    const double value =
        tail[N] * std::pow(static_cast<double>(seq.q(N)), eta) / static_cast<double>(N);
    if (value > d.c_eta) {
      d.c_eta = value;
      d.c_eta_argmax = N;
    }
  }

  d.measured_cd = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= K; ++k) {
    const double qk = static_cast<double>(seq.q(k));
    d.measured_cd = std::min(d.measured_cd,
                             seq.residuals[k - 1].to_double() * std::pow(qk, (1.0 + nu) / m));
  }
  d.bracket_a1 = std::pow(d.measured_cd, m / (1.0 + nu));
  d.bracket_a2 = 1.0;
  d.gamma1 = std::numeric_limits<double>::infinity();
  d.gamma2 = 0.0;
  for (std::size_t k = 1; k <= K; ++k) {
    const double qk = static_cast<double>(seq.q(k));
    const double inv_k = 1.0 / static_cast<double>(k);
    d.gamma1 = std::min(d.gamma1, std::pow(qk / d.bracket_a1, inv_k));
    d.gamma2 = std::max(d.gamma2, std::pow(qk / d.bracket_a2, inv_k));
  }
  return d;
}

DiophantineOrderFit estimate_diophantine_order(const FrequencyTuple& omega, std::int64_t q_max,
                                               unsigned workers) {
  if (q_max < 1) throw ValidationError("estimate_diophantine_order: q_max must be >= 1");
  omega.check_multiplier(q_max);
  using Records = std::vector<std::pair<std::int64_t, Phase>>;
  const auto& step = omega.phases();
  auto chunk_records = [&](IndexRange range) {
    Records out;
    std::vector<Phase> x;
    for (const auto& p : step) x.push_back(p.times(range.lo));
    for (std::int64_t q = range.lo; q <= range.hi; ++q) {
      const Phase r = sup_norm(x);
      if (out.empty() || r < out.back().second) out.emplace_back(q, r);
      for (std::size_t j = 0; j < x.size(); ++j) x[j] += step[j];
    }
    return out;
  };
  const auto parts = map_chunks<Records>(1, q_max, workers, chunk_records);
  Records records;
  for (const auto& part : parts) {
    for (const auto& rec : part) {
      if (records.empty() || rec.second < records.back().second) records.push_back(rec);
    }
  }

  const Phase degenerate = rational_threshold(omega.precision_bits());
  if (records.back().second < degenerate) {
    throw ValidationError("estimate_diophantine_order: frequency is rational or near-rational (|omega q|_m ~ 0 at q = " +
                          std::to_string(records.back().first) + ")");
  }
  if (records.size() < 3) {
    throw InsufficientDataError("estimate_diophantine_order: only " +
                                std::to_string(records.size()) +
                                " envelope points; increase q_max");
  }

  DiophantineOrderFit fit;
  std::vector<double> lx, ly;
  for (const auto& [q, r] : records) {
    const double rd = r.to_double();
    fit.support.emplace_back(q, rd);
    lx.push_back(std::log(static_cast<double>(q)));
    ly.push_back(std::log(rd));
  }
  const LinearFit line = least_squares(lx, ly);
  const double m = static_cast<double>(omega.dimension());
  fit.fitted_exponent = -line.slope;
  fit.fit_rms = line.rms_residual;
  fit.nu_hat = std::max(0.0, fit.fitted_exponent * m - 1.0);
  const double exponent = (1.0 + fit.nu_hat) / m;
  fit.c_d_hat = std::numeric_limits<double>::infinity();
  for (const auto& [q, r] : fit.support) {
    fit.c_d_hat = std::min(fit.c_d_hat, r * std::pow(static_cast<double>(q), exponent));
  }
  return fit;
}

void write_envelope_csv(std::ostream& out, const FrequencyTuple& omega, std::int64_t q_max) {
  omega.check_multiplier(q_max);
  out << "q,residual,is_record\n";
  std::vector<Phase> x = omega.phases();
  std::optional<Phase> best;
  for (std::int64_t q = 1; q <= q_max; ++q) {
    const Phase r = sup_norm(x);
    const bool record = !best || r < *best;
    if (record) best = r;
    out << q << ',' << format_real(r.to_double()) << ',' << (record ? 1 : 0) << '\n';
    for (std::size_t j = 0; j < x.size(); ++j) x[j] += omega.phases()[j];
  }
}

void write_sequence_csv(std::ostream& out, const ConvergentSequence& seq) {
  out << "k,q_k,residual_k,a_{k+1},A1_bound\n";
  for (std::size_t k = 1; k <= seq.size(); ++k) {
    out << k << ',' << seq.q(k) << ',' << format_real(seq.residuals[k - 1].to_double()) << ',';
    if (k < seq.size()) {
      out << seq.partial_quotient_bounds[k - 1] << ',' << format_real(seq.a1_bound(k));
    } else {
      out << ',';
    }
    out << '\n';
  }
}

}  // namespace kdim
