#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "kdim/approx.hpp"
#include "kdim/errors.hpp"
#include "oracle.hpp"

using namespace kdim;

namespace {

FrequencyTuple freq(std::initializer_list<std::string> d,
                    std::int64_t q_max = std::int64_t{1} << 40) {
  const std::vector<std::string> v(d);
  return FrequencyTuple::from_descriptors(v, 192, q_max);
}

}  // namespace

TEST_CASE("dirichlet_search examples") {
  const FrequencyTuple g = freq({"golden-1"});
  const DirichletResult r = dirichlet_search_full(g, 10);
  CHECK(r.q == 8);
  CHECK(r.residual.to_double() == doctest::Approx(0.055728).epsilon(1e-5));
  CHECK(r.residual.to_double() < 0.1);
  CHECK(dirichlet_search(freq({"sqrt(2)-1"}), 6) == 5);
  CHECK(dirichlet_search(g, 1.5) == 1);
  CHECK_THROWS_AS(dirichlet_search(g, 0.5), ValidationError);
  CHECK_THROWS_AS(dirichlet_search(freq({"golden-1"}, 1000), 1001), PrecisionError);
}

TEST_CASE("dirichlet_search equals the MPFR brute-force argmin") {
  oracle::Gen gen(9);
  for (int trial = 0; trial < 30; ++trial) {
    const std::string a = gen.irrational_descriptor();
    const std::string b = gen.irrational_descriptor();
    const bool pair = trial % 2 == 1;
    const FrequencyTuple w = pair ? freq({a, b}) : freq({a});
    std::vector<oracle::Real> ref;
    for (const auto& d : w.descriptors()) {
      const auto p = std::stoul(d.substr(5));
      const auto k = std::stol(d.substr(d.find('-') + 1));
      ref.push_back(oracle::sqrt_minus(p, k));
    }
    const std::int64_t Q = gen.integer(1, 3000);
    CAPTURE(a);
    CAPTURE(Q);
    CHECK(dirichlet_search(w, static_cast<double>(Q)) == oracle::dirichlet(ref, Q));
  }
}

TEST_CASE("parallel dirichlet_search is worker-count independent") {
  const FrequencyTuple w = freq({"sqrt(2)-1", "sqrt(3)-1"});
  const auto one = dirichlet_search_full(w, 300000, {false, 1});
  for (unsigned workers : {2u, 3u, 8u}) {
    const auto many = dirichlet_search_full(w, 300000, {false, workers});
    CHECK(many.q == one.q);
    CHECK(many.residual == one.residual);
  }
}

TEST_CASE("Dirichlet guarantee on a 2^k ladder (property)") {
  for (const char* d : {"golden-1", "sqrt(2)-1", "pi-3", "zeta(3)-1"}) {
    const FrequencyTuple w = freq({d});
    for (int k = 1; k <= 22; ++k) {
      const double Q = std::ldexp(1.0, k);
      CAPTURE(d);
      CAPTURE(k);
      CHECK(dirichlet_search_full(w, Q).residual.to_double() < 1.0 / Q);
    }
  }
}

TEST_CASE("continued-fraction fast path agrees with brute force") {
  for (const char* d : {"golden-1", "sqrt(2)-1", "pi-3", "e-2"}) {
    const FrequencyTuple w = freq({d});
    for (double Q : {1.5e6, 2.5e6, 4.0e6}) {
      const auto fast = dirichlet_search_full(w, Q, {true, 0});
      const auto slow = dirichlet_search_full(w, Q, {false, 0});
      CAPTURE(d);
      CAPTURE(Q);
      CHECK(fast.q == slow.q);
    }
  }
}

TEST_CASE("continued_fraction examples and floor-recursion oracle") {
  const ContinuedFraction g = continued_fraction(evaluate_descriptor("golden", 192), 6);
  REQUIRE(g.quotients.size() == 7);
  for (const auto& a : g.quotients) CHECK(a == 1);
  const std::vector<long> fib{1, 1, 2, 3, 5, 8, 13};
  for (std::size_t i = 0; i < fib.size(); ++i) CHECK(g.denominators[i] == fib[i]);
  CHECK_FALSE(g.rational);

  const ContinuedFraction s = continued_fraction(evaluate_descriptor("sqrt(2)", 192), 4);
  const std::vector<long> den{1, 2, 5, 12, 29};
  for (std::size_t i = 0; i < den.size(); ++i) CHECK(s.denominators[i] == den[i]);
  CHECK(s.quotients[0] == 1);
  for (std::size_t i = 1; i < s.quotients.size(); ++i) CHECK(s.quotients[i] == 2);

  const ContinuedFraction r = continued_fraction(evaluate_descriptor("3/7", 192), 10);
  CHECK(r.rational);
  REQUIRE(r.quotients.size() == 3);
  CHECK(r.quotients[0] == 0);
  CHECK(r.quotients[1] == 2);
  CHECK(r.quotients[2] == 3);
  CHECK(r.numerators.back() == 3);
  CHECK(r.denominators.back() == 7);

  const auto pi_ref = oracle::partial_quotients(oracle::pi_minus_three(), 12);
  const ContinuedFraction p = continued_fraction(evaluate_descriptor("pi-3", 192), 12);
  for (std::size_t i = 0; i < pi_ref.size(); ++i) CHECK(p.quotients[i] == pi_ref[i]);
  CHECK(p.quotients[1] == 7);
  CHECK(p.quotients[2] == 15);
  CHECK(p.quotients[4] == 292);
}

TEST_CASE("continued_fraction determinant identity and error bound (property)") {
  oracle::Gen gen(4);
  for (int trial = 0; trial < 20; ++trial) {
    const std::string d = gen.irrational_descriptor();
    const PrecisionReal x = evaluate_descriptor(d, 192);
    const ContinuedFraction cf = continued_fraction(x, 25);
    for (std::size_t k = 1; k < cf.denominators.size(); ++k) {
      const mpz_class det = cf.numerators[k] * cf.denominators[k - 1] -
                            cf.numerators[k - 1] * cf.denominators[k];
      CHECK(det == ((k % 2 == 1) ? 1 : -1));
    }
    for (std::size_t k = 0; k + 1 < cf.denominators.size(); ++k) {
      // |x - p_k/q_k| < 1/(q_k q_{k+1})
      const double err = std::fabs(x.to_double() - cf.numerators[k].get_d() / cf.denominators[k].get_d());
      CHECK(err < 1.0 / (cf.denominators[k].get_d() * cf.denominators[k + 1].get_d()) + 1e-15);
    }
  }
  CHECK_THROWS_AS(continued_fraction(evaluate_descriptor("golden", 64), 200), PrecisionError);
}

TEST_CASE("convergent_sequence examples") {
  const FrequencyTuple g = freq({"golden-1"});
  const ConvergentSequence s = convergent_sequence(g, 2.0, 5);
  CHECK(s.denominators == std::vector<std::int64_t>{2, 3, 8, 13, 21});
  CHECK(s.repairs == 0);
  CHECK(s.c_hat == 2.0);
  CHECK(s.partial_quotient_bounds == std::vector<std::int64_t>{1, 2, 1, 1});

  const ConvergentSequence one = convergent_sequence(g, 2.0, 1);
  CHECK(one.denominators == std::vector<std::int64_t>{dirichlet_search(g, 2.0)});

  const ConvergentSequence four = convergent_sequence(g, 2.0, 4);
  CHECK(four.residuals[2].to_double() == doctest::Approx(0.0557).epsilon(1e-3));
  CHECK(four.residuals[2].to_double() <= four.a1_bound(3));
  CHECK(four.a1_bound(3) == doctest::Approx(2.0 / 13));

  CHECK_THROWS_AS(convergent_sequence(freq({"1/3"}), 2.0, 5), ValidationError);
  CHECK_THROWS_AS(convergent_sequence(g, 1.0, 5), ValidationError);
  CHECK_THROWS_AS(convergent_sequence(g, 2.0, 0), ValidationError);
}

TEST_CASE("convergent_sequence invariants on random frequencies (property)") {
  oracle::Gen gen(31);
  for (int trial = 0; trial < 12; ++trial) {
    const bool pair = trial % 3 == 0;
    const FrequencyTuple w = pair ? freq({gen.irrational_descriptor(), gen.irrational_descriptor()})
                                  : freq({gen.irrational_descriptor()});
    const double beta = gen.uniform(1.3, 3.0);
    const ConvergentSequence s = convergent_sequence(w, beta, 14);
    for (std::size_t k = 1; k < s.size(); ++k) {
      CHECK(s.q(k) <= s.q(k + 1));
      CHECK(s.q(k) >= 1);
      CHECK(s.residuals[k - 1].to_double() <= s.a1_bound(k) + 0x1p-32);
      CHECK(s.partial_quotient_bounds[k - 1] >= 1);
    }
  }
}

TEST_CASE("argmin dominance over classical convergents for m = 1") {
  const FrequencyTuple w = freq({"pi-3"});
  const ContinuedFraction cf = continued_fraction(w.components()[0], 12);
  const ConvergentSequence s = convergent_sequence(w, 2.0, 20);
  for (std::size_t k = 1; k <= s.size(); ++k) {
    const double level = std::floor(std::ldexp(1.0, static_cast<int>(k)));
    std::int64_t best_cf = 1;
    for (const auto& q : cf.denominators) {
      if (q.get_d() <= level) best_cf = q.get_si();
    }
    CHECK(s.residuals[k - 1] <= torus_norm_exact(frac_mult(w, best_cf)));
  }
}

TEST_CASE("verify_sequence_properties") {
  const FrequencyTuple g = freq({"golden-1"});
  const ConvergentSequence s = convergent_sequence(g, 2.0, 5);
  const SequenceDiagnostics d = verify_sequence_properties(s, 0.0, 1.0);
  CHECK(d.growth_exponent <= 1.2);
  CHECK(std::isfinite(d.c_eta));
  for (std::size_t k = 1; k <= s.size(); ++k) {
    const double q = static_cast<double>(s.q(k));
    CHECK(d.bracket_a1 * std::pow(d.gamma1, k) <= q * (1 + 1e-12));
    CHECK(q <= d.bracket_a2 * std::pow(d.gamma2, k) * (1 + 1e-12));
  }

  ConvergentSequence synthetic = s;
  synthetic.denominators.clear();
  for (int k = 1; k <= 10; ++k) synthetic.denominators.push_back(std::int64_t{1} << k);
  synthetic.residuals.assign(10, Phase::pow2(20));
  const SequenceDiagnostics sd = verify_sequence_properties(synthetic, 0.0, 1.0);
  CHECK(sd.max_growth_ratio == 2.0);
  CHECK(sd.c_eta == doctest::Approx(2.0 - std::ldexp(1.0, -9)));
  CHECK(sd.c_eta_argmax == 1);
  CHECK(sd.growth_exponent == doctest::Approx(1.0 + 0.0).epsilon(0.2));

  ConvergentSequence short_seq = s;
  short_seq.denominators.resize(2);
  CHECK_THROWS_AS(verify_sequence_properties(short_seq, 0.0, 1.0), ValidationError);
}

TEST_CASE("estimate_diophantine_order") {
  for (const char* d : {"golden-1", "sqrt(2)-1"}) {
    const FrequencyTuple w = freq({d});
    const DiophantineOrderFit fit = estimate_diophantine_order(w, 100000);
    CAPTURE(d);
    CHECK(fit.nu_hat <= 0.05);
    CHECK(fit.c_d_hat > 0.0);
    // invariant: every sampled q lies above the fitted envelope
    const double e = (1.0 + fit.nu_hat);
    for (std::int64_t q = 1; q <= 100000; q += 7) {
      const double r = torus_norm(frac_mult(w, q));
      CHECK(r >= fit.c_d_hat * std::pow(static_cast<double>(q), -e) - 0x1p-32);
    }
  }
  CHECK_THROWS_AS(estimate_diophantine_order(freq({"2/7"}), 1000), ValidationError);
  const FrequencyTuple g = freq({"golden-1"});
  const auto a = estimate_diophantine_order(g, 200000, 1);
  const auto b = estimate_diophantine_order(g, 200000, 4);
  CHECK(a.support == b.support);
  CHECK(a.nu_hat == b.nu_hat);
}

TEST_CASE("CSV writers") {
  const FrequencyTuple g = freq({"golden-1"});
  std::ostringstream env;
  write_envelope_csv(env, g, 5);
  CHECK(env.str().rfind("q,residual,is_record\n1,", 0) == 0);
  std::ostringstream seq;
  write_sequence_csv(seq, convergent_sequence(g, 2.0, 2));
  CHECK(seq.str() ==
        "k,q_k,residual_k,a_{k+1},A1_bound\n"
        "1,2,0.2360679774997897,1,0.6666666666666666\n"
        "2,3,0.14589803375031546,,\n");
}
