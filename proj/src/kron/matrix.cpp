#include <algorithm>
#include <cmath>
#include <limits>

#include "kdim/format.hpp"
#include "kdim/kron.hpp"
#include "kdim/parallel.hpp"

namespace kdim {

ExtendedSystem build_extended(const FrequencyMatrix& A, const TorusPoint& theta) {
  if (theta.dimension() != A.rows()) {
    throw ValidationError("theta has dimension " + std::to_string(theta.dimension()) +
                          " but A has " + std::to_string(A.rows()) + " rows");
  }
  const std::size_t n = A.cols();
  const std::size_t m = A.rows();
  const int bits = A.entries().empty() ? kDefaultPrecisionBits : A.entries().front().precision_bits();
  std::vector<PrecisionReal> entries;
  entries.reserve((n + m) * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) entries.emplace_back(std::int64_t{r == c ? 1 : 0}, bits);
  }
  for (const auto& e : A.entries()) entries.push_back(e);

  std::vector<Phase> coords(n);
  coords.insert(coords.end(), theta.coords().begin(), theta.coords().end());
  return ExtendedSystem{FrequencyMatrix(n + m, n, std::move(entries), A.precision_bits(), A.q_max()),
                        TorusPoint(std::move(coords)), n, m};
}

IntegerBox IntegerBox::cube(std::size_t n, std::int64_t lo, std::int64_t hi) {
  return IntegerBox{std::vector<std::int64_t>(n, lo), std::vector<std::int64_t>(n, hi)};
}

std::int64_t IntegerBox::volume() const {
  if (lo.size() != hi.size()) throw ValidationError("box corners differ in dimension");
  constexpr __int128 cap = std::numeric_limits<std::int64_t>::max();
  __int128 v = 1;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (hi[i] < lo[i]) return 0;
    v *= static_cast<__int128>(hi[i]) - lo[i] + 1;
    if (v > cap) return std::numeric_limits<std::int64_t>::max();
  }
  return static_cast<std::int64_t>(v);
}

namespace {

using IntVec = std::vector<std::int64_t>;

void check_box(const IntegerBox& box, std::size_t n, std::int64_t budget) {
  if (box.dimension() != n || box.hi.size() != n) {
    throw ValidationError("box has dimension " + std::to_string(box.dimension()) +
                          ", expected " + std::to_string(n));
  }
  if (n == 0) throw ValidationError("box must have dimension >= 1");
  for (std::size_t i = 0; i < n; ++i) {
    if (box.lo[i] > box.hi[i]) throw ValidationError("box is empty");
  }
  const std::int64_t volume = box.volume();
  if (volume > budget) {
    throw BudgetError("box holds " + std::to_string(volume) + " points, budget is " +
                      std::to_string(budget));
  }
}

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 0.5)) {
    throw ValidationError("epsilon must lie in (0, 1/2], got " + format_real(epsilon));
  }
}

// Largest |q_c| per coordinate over the box, as a multiplier vector.
IntVec corner_magnitudes(const IntegerBox& box) {
  IntVec out(box.dimension());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto mag = [](std::int64_t v) {
      return v == std::numeric_limits<std::int64_t>::min() ? std::numeric_limits<std::int64_t>::max()
                                                           : (v < 0 ? -v : v);
    };
    out[i] = std::max(mag(box.lo[i]), mag(box.hi[i]));
  }
  return out;
}

// Visits every q in box (q[0] fixed to [first_lo, first_hi]) in lexicographic
// order, calling visit(q, x) with x = A q - theta. Phases are kept
// incrementally: advancing coordinate c adds column c, a wrap of coordinate c
// subtracts (hi_c - lo_c) times column c.
template <class Visit>
void walk_box(const FrequencyMatrix& A, const TorusPoint& theta, const IntegerBox& box,
              std::int64_t first_lo, std::int64_t first_hi, Visit&& visit) {
  const std::size_t m = A.rows();
  const std::size_t n = A.cols();
  IntVec q = box.lo;
  q[0] = first_lo;
  IntVec hi = box.hi;
  hi[0] = first_hi;

  std::vector<Phase> x(m);
  for (std::size_t r = 0; r < m; ++r) {
    Phase acc = -theta[r];
    for (std::size_t c = 0; c < n; ++c) acc += A.phase(r, c).times(q[c]);
    x[r] = acc;
  }
  std::vector<Phase> wrap(m * n);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < n; ++c) wrap[r * n + c] = A.phase(r, c).times(hi[c] - box.lo[c]);
  }

  for (;;) {
    visit(q, x);
    std::size_t c = n;
    while (c > 0) {
      --c;
      if (q[c] < hi[c]) {
        ++q[c];
        for (std::size_t r = 0; r < m; ++r) x[r] += A.phase(r, c);
        break;
      }
      q[c] = box.lo[c];
      for (std::size_t r = 0; r < m; ++r) x[r] -= wrap[r * n + c];
      if (c == 0) return;
    }
  }
}

PrecisionReal phase_to_real(const Phase& p, int bits) {
  PrecisionReal out(std::int64_t{0}, bits);
  PrecisionReal part(bits);
  for (int i = 0; i < Phase::kLimbs; ++i) {
    mpfr_set_ui_2exp(part.raw(), p.limbs()[i], 64 * i - Phase::kBits, MPFR_RNDN);
    out += part;
  }
  return out;
}

}  // namespace

std::vector<std::vector<std::int64_t>> matrix_solution_scan(const FrequencyMatrix& A,
                                                            const TorusPoint& theta,
                                                            double epsilon,
                                                            const IntegerBox& box,
                                                            std::int64_t budget,
                                                            unsigned workers) {
  check_epsilon(epsilon);
  if (theta.dimension() != A.rows()) {
    throw ValidationError("theta has dimension " + std::to_string(theta.dimension()) +
                          " but A has " + std::to_string(A.rows()) + " rows");
  }
  check_box(box, A.cols(), budget);
  A.check_multiplier(corner_magnitudes(box));

  const Phase eps = Phase::from_double(epsilon);
  const bool everything = epsilon >= 0.5;
  auto parts = map_chunks<std::vector<IntVec>>(
      box.lo[0], box.hi[0], workers,
      [&](IndexRange range) {
        std::vector<IntVec> hits;
        walk_box(A, theta, box, range.lo, range.hi,
                 [&](const IntVec& q, const std::vector<Phase>& x) {
                   if (everything || sup_norm(x) <= eps) hits.push_back(q);
                 });
        return hits;
      },
      1);
  std::vector<IntVec> out;
  for (auto& p : parts) {
    for (auto& q : p) out.push_back(std::move(q));
  }
  return out;
}

std::vector<std::vector<std::int64_t>> extended_integer_solutions(const ExtendedSystem& ext,
                                                                  double epsilon,
                                                                  const IntegerBox& box,
                                                                  std::int64_t budget) {
  check_epsilon(epsilon);
  const FrequencyMatrix& a = ext.a_hat;
  check_box(box, a.cols(), budget);
  a.check_multiplier(corner_magnitudes(box));

  const int bits = Phase::kBits + 64;
  std::vector<PrecisionReal> theta;
  for (const auto& t : ext.theta_hat.coords()) theta.push_back(phase_to_real(t, bits));
  const PrecisionReal eps(epsilon, bits);
  const PrecisionReal half(0.5, bits);

  std::vector<IntVec> out;
  IntVec q = box.lo;
  std::vector<PrecisionReal> qr;
  for (;;) {
    qr.clear();
    for (auto v : q) qr.emplace_back(v, bits);
    bool ok = true;
    for (std::size_t r = 0; r < a.rows() && ok; ++r) {
      PrecisionReal s = -theta[r];
      for (std::size_t c = 0; c < a.cols(); ++c) s += a.entry(r, c).with_precision(bits) * qr[c];
      PrecisionReal f = s.frac();
      if (f > half) f = PrecisionReal(std::int64_t{1}, bits) - f;
      ok = f <= eps;
    }
    if (ok) out.push_back(q);

    std::size_t c = q.size();
    for (;;) {
      if (c == 0) return out;
      --c;
      if (q[c] < box.hi[c]) {
        ++q[c];
        break;
      }
      q[c] = box.lo[c];
    }
  }
}

std::vector<TorusPoint> orbit_sample(const FrequencyMatrix& A, Lattice lattice,
                                     std::int64_t count, const PrecisionReal& step) {
  if (count < 1) throw ValidationError("orbit sample count must be positive");
  if (!(step.sign() > 0)) throw ValidationError("orbit step must be positive");
  const std::size_t n = A.cols();
  const std::size_t m = A.rows();

  std::int64_t side = 1;
  const auto covers = [&](std::int64_t s) {
    __int128 v = 1;
    for (std::size_t i = 0; i < n && v < count; ++i) v *= s;
    return v >= count;
  };
  while (!covers(side)) ++side;
  const std::int64_t reach = side - 1;

  // Per-entry phase of A_rc * step; the sample at grid index i is sum_c i_c * that.
  std::vector<Phase> unit(m * n);
  if (lattice == Lattice::integer) {
    if (!(step.floor() == step)) throw ValidationError("integer lattice needs an integer step");
    const std::int64_t s = step.floor_int();
    if (reach > 0 && s > std::numeric_limits<std::int64_t>::max() / reach) {
      throw PrecisionError("orbit extent overflows");
    }
    A.check_multiplier(IntVec(n, reach * s));
    for (std::size_t k = 0; k < m * n; ++k) unit[k] = A.phase(k / n, k % n).times(s);
  } else {
    check_precision_budget(A.precision_bits(),
                           std::max<std::int64_t>(1, reach * static_cast<std::int64_t>(n)));
    const int bits = Phase::kBits + 64;
    const PrecisionReal st = step.with_precision(bits);
    for (std::size_t k = 0; k < m * n; ++k) {
      unit[k] = Phase::from_real(A.entries()[k].with_precision(bits) * st);
    }
  }

  std::vector<TorusPoint> out;
  out.reserve(static_cast<std::size_t>(count));
  IntVec idx(n, 0);
  std::vector<Phase> x(m);
  std::vector<Phase> wrap(m * n);
  for (std::size_t k = 0; k < m * n; ++k) wrap[k] = unit[k].times(reach);
  while (static_cast<std::int64_t>(out.size()) < count) {
    out.emplace_back(x);
    std::size_t c = n;
    while (c > 0) {
      --c;
      if (idx[c] < reach) {
        ++idx[c];
        for (std::size_t r = 0; r < m; ++r) x[r] += unit[r * n + c];
        break;
      }
      idx[c] = 0;
      for (std::size_t r = 0; r < m; ++r) x[r] -= wrap[r * n + c];
    }
  }
  return out;
}

}  // namespace kdim
