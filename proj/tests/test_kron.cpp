#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kdim/kron.hpp"
#include "oracle.hpp"

using namespace kdim;

namespace {

FrequencyTuple freq(std::initializer_list<std::string> d,
                    std::int64_t q_max = std::int64_t{1} << 40) {
  const std::vector<std::string> v(d);
  return FrequencyTuple::from_descriptors(v, 192, q_max);
}

// Oracle copy of a tuple whose descriptors are all sqrt(p)-k or golden-1.
std::vector<oracle::Real> reference(const FrequencyTuple& w) {
  std::vector<oracle::Real> out;
  for (const auto& d : w.descriptors()) {
    if (d == "golden-1") {
      out.push_back(oracle::golden_minus_one());
    } else {
      out.push_back(oracle::sqrt_minus(std::stoul(d.substr(5)), std::stol(d.substr(d.find('-') + 1))));
    }
  }
  return out;
}

std::vector<oracle::Real> reference(const TorusPoint& theta) {
  std::vector<oracle::Real> out;
  for (double c : theta.to_doubles()) out.push_back(oracle::from_double(c));
  return out;
}

ConvergentSequence golden_sequence(int K) {
  return convergent_sequence(freq({"golden-1"}), 2.0, K);
}

}  // namespace

TEST_CASE("KroneckerInstance validation") {
  const FrequencyTuple g = freq({"golden-1"});
  CHECK_THROWS_AS(KroneckerInstance(g, TorusPoint::origin(1), 0.0), ValidationError);
  CHECK_THROWS_AS(KroneckerInstance(g, TorusPoint::origin(1), 0.6), ValidationError);
  CHECK_THROWS_AS(KroneckerInstance(g, TorusPoint::origin(2), 0.1), ValidationError);
  CHECK(KroneckerInstance(g, TorusPoint::origin(1), 0.5).trivially_solvable());
}

TEST_CASE("solve_in_interval examples") {
  const FrequencyTuple g = freq({"golden-1"});
  CHECK(solve_in_interval(KroneckerInstance(g, TorusPoint::origin(1), 0.06), 1, 20) == 8);

  const KroneckerInstance hit(g, frac_mult(g, 5), 1e-12);
  CHECK(solve_in_interval(hit, 5, 5) == 5);
  CHECK_FALSE(solve_in_interval(hit, 6, 1000).has_value());

  const FrequencyTuple w = freq({"sqrt(2)-1", "sqrt(3)-1"});
  const KroneckerInstance pair(w, TorusPoint::origin(2), 0.1);
  CHECK(solve_in_interval(pair, 1, 1000) == 41);
  const TorusPoint at41 = frac_mult(w, 41);
  CHECK(std::min(at41.coord(0), 1 - at41.coord(0)) == doctest::Approx(0.017).epsilon(0.05));
  CHECK(std::min(at41.coord(1), 1 - at41.coord(1)) == doctest::Approx(0.014).epsilon(0.05));

  CHECK_THROWS_AS(solve_in_interval(pair, 5, 4), ValidationError);
  const KroneckerInstance small(freq({"golden-1"}, 100), TorusPoint::origin(1), 0.1);
  CHECK_THROWS_AS(solve_in_interval(small, 0, 101), PrecisionError);
}

TEST_CASE("gap_scan examples") {
  const FrequencyTuple g = freq({"golden-1"});
  const KroneckerInstance inst(g, TorusPoint::origin(1), 0.06);
  const GapScan scan = gap_scan(inst, 0, 200);
  const std::vector<std::int64_t> prefix{0, 8, 13, 21, 34, 42, 47, 55};
  REQUIRE(scan.solutions.size() >= prefix.size());
  CHECK(std::equal(prefix.begin(), prefix.end(), scan.solutions.begin()));
  CHECK(scan.l_hat == 13);
  CHECK(scan.solutions == oracle::scan(reference(g), oracle::zeros(1), 0.06, 0, 200));
  for (auto gap : scan.gaps) CHECK(gap >= 1);

  const GapScan all = gap_scan(KroneckerInstance(g, TorusPoint::origin(1), 0.5), 0, 10);
  CHECK(all.solutions.size() == 11);
  CHECK(all.l_hat == 1);

  const GapScan finer = gap_scan(KroneckerInstance(g, TorusPoint::origin(1), 0.03), 0, 200);
  CHECK(finer.l_hat >= scan.l_hat);

  try {
    gap_scan(KroneckerInstance(g, TorusPoint::origin(1), 0.001), 1, 50);
    FAIL("expected WidenWindowError");
  } catch (const WidenWindowError& e) {
    CHECK(e.found == 0);
    CHECK(e.exit_code() == 5);
  }
}

TEST_CASE("gap_scan truncation flag") {
  const FrequencyTuple g = freq({"golden-1"});
  const KroneckerInstance inst(g, TorusPoint::origin(1), 0.06);
  // solutions 8 .. 55 with l_hat 13; edge runs of 7 and 5 are both shorter
  CHECK_FALSE(gap_scan(inst, 1, 60).truncated);
  // solutions 34, 42, 47, 55 give l_hat 8, but 22..33 is a run of 12
  const GapScan clipped = gap_scan(inst, 22, 60);
  CHECK(clipped.solutions == std::vector<std::int64_t>{34, 42, 47, 55});
  CHECK(clipped.l_hat == 8);
  CHECK(clipped.truncated);
}

TEST_CASE("scan_solutions is complete against the MPFR oracle (property)") {
  oracle::Gen gen(101);
  for (int trial = 0; trial < 40; ++trial) {
    const bool pair = trial % 2 == 0;
    const FrequencyTuple w = pair ? freq({gen.irrational_descriptor(), gen.irrational_descriptor()})
                                  : freq({gen.irrational_descriptor()});
    const TorusPoint theta = TorusPoint::from_doubles(gen.unit_vector(w.dimension()));
    const double eps = gen.uniform(0.01, 0.3);
    const std::int64_t a = gen.integer(-3000, 3000);
    const std::int64_t b = a + gen.integer(0, 2000);
    const KroneckerInstance inst(w, theta, eps);
    const auto got = scan_solutions(inst, a, b);
    const auto ref = reference(w);
    const auto th = reference(theta);
    std::vector<std::int64_t> diff;
    const auto want = oracle::scan(ref, th, eps, a, b);
    std::set_symmetric_difference(got.begin(), got.end(), want.begin(), want.end(),
                                  std::back_inserter(diff));
    for (auto q : diff) {
      // only boundary cases within the residual trust margin may disagree
      CHECK(std::fabs(oracle::residual(ref, q, th) - eps) <= 0x1p-32);
    }
    for (auto q : got) CHECK(oracle::residual(ref, q, th) <= eps + 0x1p-32);
  }
}

TEST_CASE("scan output is independent of the worker count") {
  const FrequencyTuple w = freq({"sqrt(2)-1", "sqrt(3)-1"});
  const KroneckerInstance inst(w, TorusPoint::origin(2), 0.02);
  const auto one = scan_solutions(inst, -200000, 500000, 1);
  for (unsigned workers : {2u, 5u, 16u}) CHECK(scan_solutions(inst, -200000, 500000, workers) == one);
  CHECK(solve_in_interval(inst, 1, 500000, 1) == solve_in_interval(inst, 1, 500000, 7));
}

TEST_CASE("monotonicity in epsilon (property)") {
  oracle::Gen gen(12);
  for (int trial = 0; trial < 20; ++trial) {
    const FrequencyTuple w = freq({gen.irrational_descriptor()});
    const TorusPoint theta = TorusPoint::from_doubles(gen.unit_vector(1));
    const double e2 = gen.uniform(0.02, 0.3);
    const double e1 = e2 * gen.uniform(0.3, 0.99);
    const auto big = scan_solutions(KroneckerInstance(w, theta, e2), 0, 5000);
    const auto small = scan_solutions(KroneckerInstance(w, theta, e1), 0, 5000);
    CHECK(std::includes(big.begin(), big.end(), small.begin(), small.end()));
  }
}

TEST_CASE("shift covariance (property)") {
  oracle::Gen gen(13);
  for (int trial = 0; trial < 20; ++trial) {
    const FrequencyTuple w = freq({gen.irrational_descriptor(), gen.irrational_descriptor()});
    const TorusPoint theta = TorusPoint::from_doubles(gen.unit_vector(2));
    const std::int64_t s = gen.integer(-100000, 100000);
    std::vector<Phase> shifted;
    for (std::size_t j = 0; j < 2; ++j) shifted.push_back(theta[j] + w.phases()[j].times(s));
    const double eps = gen.uniform(0.05, 0.2);
    auto base = scan_solutions(KroneckerInstance(w, theta, eps), 0, 4000);
    const auto moved = scan_solutions(KroneckerInstance(w, TorusPoint(shifted), eps), s, s + 4000);
    for (auto& q : base) q += s;
    CHECK(base == moved);
  }
}

TEST_CASE("two-solution law over random gap scans (property)") {
  oracle::Gen gen(14);
  for (int trial = 0; trial < 15; ++trial) {
    const FrequencyTuple w = freq({gen.irrational_descriptor(), gen.irrational_descriptor()});
    const TorusPoint theta = TorusPoint::from_doubles(gen.unit_vector(2));
    const KroneckerInstance inst(w, theta, gen.uniform(0.05, 0.2));
    const GapScan scan = gap_scan(inst, 0, 20000);
    const TwoSolutionReport law = check_two_solution_law(scan);
    CHECK(law.pairs_checked == scan.solutions.size() * (scan.solutions.size() - 1) / 2);
    CHECK(law.violations == 0);
    CHECK(law.worst_excess <= 0x1p-31);
  }
}

TEST_CASE("inclusion_length_ladder") {
  const FrequencyTuple g = freq({"golden-1"});
  const auto rows = inclusion_length_ladder(g, TorusPoint::origin(1), {0.1, 0.05, 0.025});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].l_hat <= rows[1].l_hat);
  CHECK(rows[1].l_hat <= rows[2].l_hat);
  for (const auto& r : rows) {
    CHECK_FALSE(r.truncated);
    CHECK(r.window_hi >= 10000);
  }

  const auto fine = inclusion_length_ladder(g, TorusPoint::origin(1), {0.01});
  CHECK(fine[0].l_hat >= 55);
  CHECK(fine[0].l_hat <= 233);

  const FrequencyTuple third = freq({"1/3"});
  const auto periodic = inclusion_length_ladder(third, TorusPoint::origin(1), {0.16, 0.1, 0.01});
  for (const auto& r : periodic) CHECK(r.l_hat == 3);

  CHECK_THROWS_AS(inclusion_length_ladder(g, TorusPoint::origin(1), {0.05, 0.1}), ValidationError);
  CHECK_THROWS_AS(inclusion_length_ladder(g, TorusPoint::origin(1), {0.6}), ValidationError);
  CHECK_THROWS_AS(inclusion_length_ladder(g, TorusPoint::origin(1), {}), ValidationError);

  const WindowPolicy tight{100, 1.0, 400};
  const auto capped = inclusion_length_ladder(g, TorusPoint::origin(1), {0.1, 0.0001}, tight);
  REQUIRE(capped.size() == 2);
  CHECK_FALSE(capped[0].truncated);
  CHECK(capped[1].truncated);
  CHECK(capped[1].window_hi == 400);
}

TEST_CASE("greedy_almost_period examples") {
  const ConvergentSequence seq = golden_sequence(5);
  const AlmostPeriod ap = greedy_almost_period(seq, 30, 1);
  CHECK(ap.tau == 29);
  CHECK(ap.coefficients == std::vector<std::int64_t>{0, 0, 1, 0, 1});
  CHECK(std::fabs(ap.tau - 30.0) <= 2);
  const double want = oracle::residual({oracle::golden_minus_one()}, 29, oracle::zeros(0));
  CHECK(std::fabs(ap.residual.to_double() - want) <= 0x1p-32);
  CHECK(want == doctest::Approx(0.0771).epsilon(1e-3));
  CHECK_FALSE(ap.top_bounded);

  CHECK(greedy_almost_period(seq, 1, 1).tau == 0);
  CHECK(greedy_almost_period(seq, 1, 1).coefficients.empty());
  const AlmostPeriod neg = greedy_almost_period(seq, -30, 1);
  CHECK(neg.tau == -29);
  CHECK(neg.residual == ap.residual);

  CHECK_THROWS_AS(greedy_almost_period(seq, 30, 0), ValidationError);
  CHECK_THROWS_AS(greedy_almost_period(seq, 30, 6), ValidationError);
}

TEST_CASE("greedy coefficients obey the partial-quotient bound (property)") {
  const ConvergentSequence seq = golden_sequence(24);
  oracle::Gen gen(15);
  for (int trial = 0; trial < 500; ++trial) {
    const double A = gen.uniform(-1e6, 1e6);
    const std::size_t k0 = static_cast<std::size_t>(gen.integer(1, 8));
    const AlmostPeriod ap = greedy_almost_period(seq, A, k0);
    CHECK(std::fabs(static_cast<double>(ap.tau) - A) <= static_cast<double>(seq.q(k0)));
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < ap.coefficients.size(); ++i) {
      const std::size_t k = k0 + i;
      CHECK(ap.coefficients[i] >= 0);
      if (k < seq.size()) CHECK(ap.coefficients[i] <= seq.partial_quotient_bounds[k - 1]);
      sum += ap.coefficients[i] * seq.q(k);
    }
    CHECK(sum == (ap.tau < 0 ? -ap.tau : ap.tau));
    CHECK(ap.top_bounded);
  }
}

TEST_CASE("almost_period_quality") {
  const ConvergentSequence seq = golden_sequence(16);
  const AlmostPeriodQuality q3 = almost_period_quality(seq, 3, {100, 500, 1000}, 0.0);
  CHECK(q3.eta == 1.0);
  CHECK(q3.max_offset <= 8);
  CHECK(q3.consistent);
  CHECK(q3.samples.size() == 3);
  CHECK(q3.c2_hat == doctest::Approx(q3.max_residual * 8 / 3));

  const std::vector<double> targets{100, 500, 1000, 5000, 20000};
  const double r2 = almost_period_quality(seq, 2, targets, 0.0).max_residual;
  const double r5 = almost_period_quality(seq, 5, targets, 0.0).max_residual;
  CHECK(r5 < r2);

  const auto pair = convergent_sequence(freq({"sqrt(2)-1", "sqrt(3)-1"}), 2.0, 8);
  CHECK(almost_period_quality(pair, 2, {100}, 0.5).eta == doctest::Approx(0.25));
  CHECK_THROWS_AS(almost_period_quality(pair, 2, {100}, 1.0), ValidationError);
}

TEST_CASE("build_extended examples") {
  const FrequencyMatrix w = FrequencyMatrix::from_descriptor("golden-1");
  const ExtendedSystem ext = build_extended(w, TorusPoint::from_doubles(std::vector<double>{0.3}));
  CHECK(ext.a_hat.rows() == 2);
  CHECK(ext.a_hat.cols() == 1);
  CHECK(ext.a_hat.entry(0, 0).to_double() == 1.0);
  CHECK(ext.a_hat.entry(1, 0) == w.entry(0, 0));
  CHECK(ext.theta_hat.coord(0) == 0.0);
  CHECK(ext.theta_hat.coord(1) == 0.3);

  const FrequencyMatrix row = FrequencyMatrix::from_descriptor("sqrt(2),sqrt(3)");
  const ExtendedSystem e2 = build_extended(row, TorusPoint::origin(1));
  CHECK(e2.a_hat.rows() == 3);
  CHECK(e2.a_hat.cols() == 2);
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t c = 0; c < 2; ++c) CHECK(e2.a_hat.entry(r, c).to_double() == (r == c ? 1.0 : 0.0));
  }
  const std::vector<std::int64_t> q{7, -3};
  const TorusPoint image = e2.a_hat.apply(q);
  CHECK(image[0].is_zero());
  CHECK(image[1].is_zero());

  CHECK_THROWS_AS(build_extended(row, TorusPoint::origin(2)), ValidationError);
}

TEST_CASE("matrix_solution_scan examples") {
  const FrequencyMatrix A = FrequencyMatrix::from_descriptor("1,sqrt(2)");
  const auto sols = matrix_solution_scan(A, TorusPoint::origin(1), 0.05, IntegerBox::cube(2, -20, 20));
  CHECK(std::is_sorted(sols.begin(), sols.end()));
  for (std::int64_t q1 = -20; q1 <= 20; ++q1) {
    CHECK(std::binary_search(sols.begin(), sols.end(), std::vector<std::int64_t>{q1, 0}));
  }

  const FrequencyTuple g = freq({"golden-1"});
  const KroneckerInstance inst(g, TorusPoint::from_doubles(std::vector<double>{0.2}), 0.07);
  const auto scalar = scan_solutions(inst, -500, 500);
  const auto matrix = matrix_solution_scan(FrequencyMatrix::column(g), inst.target(), 0.07,
                                           IntegerBox::cube(1, -500, 500));
  REQUIRE(matrix.size() == scalar.size());
  for (std::size_t i = 0; i < scalar.size(); ++i) CHECK(matrix[i] == std::vector<std::int64_t>{scalar[i]});

  CHECK_THROWS_AS(matrix_solution_scan(A, TorusPoint::origin(1), 0.05, IntegerBox::cube(2, -20, 20), 100),
                  BudgetError);
  CHECK_THROWS_AS(matrix_solution_scan(A, TorusPoint::origin(1), 0.05, IntegerBox::cube(3, -2, 2)),
                  ValidationError);
  CHECK(IntegerBox::cube(2, -20, 20).volume() == 41 * 41);
  const auto box = IntegerBox::cube(2, -30, 30);
  CHECK(matrix_solution_scan(A, TorusPoint::origin(1), 0.05, box, kDefaultBoxBudget, 1) ==
        matrix_solution_scan(A, TorusPoint::origin(1), 0.05, box, kDefaultBoxBudget, 7));
}

TEST_CASE("discrete solutions equal integer points of the extended system (property)") {
  oracle::Gen gen(16);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t m = static_cast<std::size_t>(gen.integer(1, 2));
    const std::size_t n = static_cast<std::size_t>(gen.integer(1, 2));
    std::string text;
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t c = 0; c < n; ++c) text += (c ? "," : "") + gen.irrational_descriptor();
      if (r + 1 < m) text += ';';
    }
    const FrequencyMatrix A = FrequencyMatrix::from_descriptor(text);
    const TorusPoint theta = TorusPoint::from_doubles(gen.unit_vector(m));
    const double eps = gen.uniform(0.05, 0.2);
    const IntegerBox box = IntegerBox::cube(n, -15, 15);
    CAPTURE(text);
    CHECK(matrix_solution_scan(A, theta, eps, box) ==
          extended_integer_solutions(build_extended(A, theta), eps, box));
  }
}

TEST_CASE("orbit_sample") {
  const FrequencyMatrix A = FrequencyMatrix::from_descriptor("1,0;0,sqrt(2)");
  const PrecisionReal one(std::int64_t{1}, 192);
  const auto pts = orbit_sample(A, Lattice::integer, 1000, one);
  REQUIRE(pts.size() == 1000);
  for (const auto& p : pts) CHECK(p[0].is_zero());
  // lexicographic grid order: the second index runs fastest on a 32 x 32 grid
  CHECK(pts[1].coord(1) == doctest::Approx(std::sqrt(2.0) - 1));
  CHECK(pts[32].coord(1) == 0.0);

  const PrecisionReal step = evaluate_descriptor("golden-1", 256);
  const auto real = orbit_sample(A, Lattice::real, 50, step);
  CHECK(real[3].coord(1) == doctest::Approx(std::fmod(3 * 0.6180339887498949 * std::sqrt(2.0), 1.0)).epsilon(1e-9));

  const FrequencyMatrix flow = FrequencyMatrix::from_descriptor("1;sqrt(2)");
  const auto line = orbit_sample(flow, Lattice::real, 10, step);
  for (std::size_t i = 0; i < line.size(); ++i) {
    CHECK(line[i].coord(0) == doctest::Approx(std::fmod(i * 0.6180339887498949, 1.0)).epsilon(1e-12));
  }

  CHECK_THROWS_AS(orbit_sample(A, Lattice::integer, 10, PrecisionReal(0.5, 192)), ValidationError);
  CHECK_THROWS_AS(orbit_sample(A, Lattice::integer, 0, one), ValidationError);
}

TEST_CASE("kron CSV writers") {
  const FrequencyTuple g = freq({"golden-1"});
  const GapScan scan = gap_scan(KroneckerInstance(g, TorusPoint::origin(1), 0.06), 0, 21);
  std::ostringstream os;
  write_gap_scan_csv(os, scan);
  CHECK(os.str() == "epsilon,q,gap_to_next\n0.06,0,8\n0.06,8,5\n0.06,13,8\n0.06,21,\n");

  std::ostringstream ladder;
  write_ladder_csv(ladder, inclusion_length_ladder(g, TorusPoint::origin(1), {0.06}));
  CHECK(ladder.str() == "epsilon,l_hat,window_lo,window_hi,truncated\n0.06,13,0,10000,0\n");
}
