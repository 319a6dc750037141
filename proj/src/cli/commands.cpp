#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "kdim/approx.hpp"
#include "kdim/cli.hpp"
#include "kdim/dim.hpp"
#include "kdim/format.hpp"
#include "kdim/kron.hpp"

namespace kdim {

namespace {

using ojson = nlohmann::ordered_json;

// Writes artifacts into the run directory as they are produced, so a command
// that fails late still leaves its earlier outputs behind.
class Sink {
 public:
  explicit Sink(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void file(const std::string& name, const std::string& content) const {
    std::ofstream f(dir_ / name, std::ios::binary);
    f << content;
    if (!f) throw ValidationError("cannot write " + (dir_ / name).string());
  }

 private:
  std::filesystem::path dir_;
};

struct Outcome {
  int status = 0;
  std::string csv;
  ojson json;
  std::string message;
};

double parse_double(const std::string& text) {
  const char* begin = text.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (text.empty() || end != begin + text.size() || errno == ERANGE || !std::isfinite(v)) {
    throw ValidationError("not a number: '" + text + "'");
  }
  return v;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    out.push_back(parse_double(item));
  }
  if (out.empty()) throw ValidationError("empty number list");
  return out;
}

// ceil(beta^K) as a scan bound; PrecisionError when it does not fit.
std::int64_t geometric_bound(double beta, int K) {
  if (!(beta > 1.0)) throw ValidationError("beta must be > 1, got " + format_real(beta));
  if (K < 1) throw ValidationError("K must be >= 1");
  const double q = std::ceil(std::pow(beta, K));
  if (!(q < 0x1p62)) throw PrecisionError("beta^K = " + format_real(q) + " exceeds 2^62");
  return static_cast<std::int64_t>(q);
}

FrequencyTuple frequency(const RunConfig& c, std::int64_t q_max) {
  const auto parts = split_descriptor_list(c.freq);
  return FrequencyTuple::from_descriptors(parts, c.precision, std::max<std::int64_t>(q_max, 1));
}

std::string csv_of(const auto& writer) {
  std::ostringstream os;
  writer(os);
  return os.str();
}

ojson sequence_json(const ConvergentSequence& seq) {
  ojson j;
  j["denominators"] = seq.denominators;
  std::vector<double> residuals;
  for (const auto& r : seq.residuals) residuals.push_back(r.to_double());
  j["residuals"] = residuals;
  j["partial_quotient_bounds"] = seq.partial_quotient_bounds;
  j["c_hat"] = seq.c_hat;
  j["repairs"] = seq.repairs;
  return j;
}

Outcome cmd_convergents(const RunConfig& c, const Sink& sink) {
  const FrequencyTuple omega = frequency(c, geometric_bound(c.beta, c.k));
  const ConvergentSequence seq =
      convergent_sequence(omega, c.beta, c.k, DirichletOptions{true, c.threads});
  Outcome o;
  o.csv = csv_of([&](std::ostream& os) { write_sequence_csv(os, seq); });
  o.json = sequence_json(seq);
  o.json["frequency"] = omega.descriptors();
  o.json["beta"] = c.beta;
  if (seq.size() >= 3) {
    const double m = static_cast<double>(omega.dimension());
    const double eta = (1.0 - c.nu * (m - 1.0)) / m;
    const SequenceDiagnostics diag = verify_sequence_properties(seq, c.nu, eta);
    o.json["diagnostics"] = {{"nu", c.nu},
                             {"eta", eta},
                             {"growth_exponent", diag.growth_exponent},
                             {"growth_log_constant", diag.growth_log_constant},
                             {"max_growth_ratio", diag.max_growth_ratio},
                             {"c_eta", diag.c_eta},
                             {"c_eta_argmax", diag.c_eta_argmax},
                             {"measured_cd", diag.measured_cd},
                             {"bracket_a1", diag.bracket_a1},
                             {"bracket_a2", diag.bracket_a2},
                             {"gamma1", diag.gamma1},
                             {"gamma2", diag.gamma2}};
  }
  sink.file("sequence.csv", o.csv);
  sink.file("convergents.json", o.json.dump(2) + "\n");
  return o;
}

struct LadderRun {
  std::vector<LadderRow> rows;
  std::size_t dimension = 0;
  ojson json;
};

LadderRun run_ladder(const RunConfig& c, const Sink& sink) {
  const FrequencyTuple omega = frequency(c, c.window_budget);
  const TorusPoint theta = parse_torus_point(c.theta, omega.dimension(), c.precision);
  const WindowPolicy policy{c.min_window, c.seed_factor, c.window_budget};
  LadderRun run;
  run.dimension = omega.dimension();
  run.rows = inclusion_length_ladder(omega, theta, c.eps, policy, c.threads);

  sink.file("ladder.csv", csv_of([&](std::ostream& os) { write_ladder_csv(os, run.rows); }));
  std::string gaps = "epsilon,q,gap_to_next\n";
  ojson rows = ojson::array();
  for (const auto& r : run.rows) {
    ojson row{{"epsilon", r.epsilon},     {"l_hat", r.l_hat},         {"window_lo", r.window_lo},
              {"window_hi", r.window_hi}, {"truncated", r.truncated}};
    if (r.scan) {
      std::string part = csv_of([&](std::ostream& os) { write_gap_scan_csv(os, *r.scan); });
      gaps += part.substr(part.find('\n') + 1);
      const TwoSolutionReport law = check_two_solution_law(*r.scan);
      row["solutions"] = r.scan->solutions.size();
      row["pairs_checked"] = law.pairs_checked;
      row["two_solution_violations"] = law.violations;
      row["worst_excess"] = law.worst_excess;
    } else {
      row["solutions"] = 0;
    }
    rows.push_back(std::move(row));
  }
  sink.file("gaps.csv", gaps);
  run.json["frequency"] = omega.descriptors();
  run.json["rows"] = std::move(rows);
  return run;
}

Outcome cmd_scan(const RunConfig& c, const Sink& sink) {
  LadderRun run = run_ladder(c, sink);
  Outcome o;
  o.csv = csv_of([&](std::ostream& os) { write_ladder_csv(os, run.rows); });
  o.json = std::move(run.json);
  sink.file("scan.json", o.json.dump(2) + "\n");
  const auto truncated = std::count_if(run.rows.begin(), run.rows.end(),
                                       [](const LadderRow& r) { return r.truncated; });
  if (truncated > 0) {
    o.status = static_cast<int>(ErrorKind::budget);
    o.message = std::to_string(truncated) + " ladder row(s) still truncated at the window budget " +
                std::to_string(c.window_budget);
  }
  return o;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::vector<InclusionSample> read_ladder_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(path + " is empty");
  const auto header = split_csv_line(line);
  const auto col = [&](const std::string& name) -> long {
    const auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : it - header.begin();
  };
  const long ce = col("epsilon");
  const long cl = col("l_hat");
  const long ct = col("truncated");
  if (ce < 0 || cl < 0) throw ValidationError(path + " needs epsilon and l_hat columns");
  std::vector<InclusionSample> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) throw ValidationError("ragged row in " + path + ": " + line);
    InclusionSample s;
    s.epsilon = parse_double(cells[ce]);
    s.l_hat = parse_double(cells[cl]);
    s.truncated = ct >= 0 && parse_double(cells[ct]) != 0.0;
    out.push_back(s);
  }
  return out;
}

Outcome cmd_dimension(const RunConfig& c, const Sink& sink) {
  std::vector<InclusionSample> ladder;
  int m = c.m;
  if (!c.from_csv.empty()) {
    ladder = read_ladder_csv(c.from_csv);
    if (m == 0) m = 1;
  } else {
    LadderRun run = run_ladder(c, sink);
    if (m == 0) m = static_cast<int>(run.dimension);
    for (const auto& r : run.rows) {
      ladder.push_back({r.epsilon, static_cast<double>(r.l_hat), r.truncated});
    }
  }
  if (m < 1 || c.n < 1) throw ValidationError("m and n must be >= 1");
  std::vector<InclusionSample> clean;
  std::copy_if(ladder.begin(), ladder.end(), std::back_inserter(clean),
               [](const InclusionSample& s) { return !s.truncated; });

  Outcome o;
  o.csv = "epsilon,l_hat\n";
  for (const auto& s : clean) o.csv += format_real(s.epsilon) + ',' + format_real(s.l_hat) + '\n';
  sink.file("dimension.csv", o.csv);

  const DimensionEstimate est = diophantine_dimension_fit(clean);
  const double d = c.d < 0 ? m + c.n : c.d;
  if (!(d >= 0 && d <= m + c.n)) throw ValidationError("d must lie in [0, m+n]");
  const double lower = lower_dimension_bound(c.n, d);

  ojson bracket{{"m", m}, {"n", c.n}, {"nu", c.nu}, {"d", d}, {"lower", lower}};
  std::string verdict;
  try {
    const double upper = upper_dimension_bound(m, c.nu);
    bracket["upper"] = upper;
    const bool inside = est.slope >= lower - c.tol && est.slope <= upper + c.tol;
    verdict = std::string(inside ? "within" : "outside") + " bracket [" + format_real(lower) +
              ", " + format_real(upper) + "] +/- " + format_real(c.tol);
  } catch (const ValidationError&) {
    bracket["upper"] = "undefined (nu*(m-1) >= 1)";
    verdict = std::string(est.slope >= lower - c.tol ? "above" : "below") + " lower bound " +
              format_real(lower) + " - " + format_real(c.tol) + "; upper bound undefined";
  }

  o.json["slope"] = est.slope;
  o.json["slope_upper"] = est.slope_upper;
  o.json["slope_lower"] = est.slope_lower;
  o.json["fit_residual"] = est.fit_residual;
  o.json["rows_used"] = clean.size();
  o.json["rows_truncated"] = ladder.size() - clean.size();
  o.json["bracket"] = std::move(bracket);
  o.json["tolerance"] = c.tol;
  o.json["verdict"] = verdict;
  sink.file("dimension.json", o.json.dump(2) + "\n");
  return o;
}

Lattice parse_lattice(const std::string& text) {
  if (text == "integer") return Lattice::integer;
  if (text == "real") return Lattice::real;
  throw ValidationError("lattice must be 'integer' or 'real', got '" + text + "'");
}

Outcome cmd_orbit(const RunConfig& c, const Sink& sink) {
  const Lattice lattice = parse_lattice(c.lattice);
  if (c.count > c.sample_budget) {
    throw BudgetError("orbit count " + std::to_string(c.count) + " exceeds the sample budget " +
                      std::to_string(c.sample_budget));
  }
  check_precision_budget(c.precision, 1);
  const FrequencyMatrix A =
      FrequencyMatrix::from_descriptor(c.matrix, c.precision, max_scan_bound(c.precision));
  const std::string step_text = c.step.empty() ? (lattice == Lattice::integer ? "1" : "golden-1")
                                               : c.step;
  const PrecisionReal step = evaluate_descriptor(step_text, c.precision + 64);
  const auto points = orbit_sample(A, lattice, c.count, step);

  std::string cloud;
  for (std::size_t j = 0; j < A.rows(); ++j) cloud += (j ? ",x" : "x") + std::to_string(j + 1);
  cloud += '\n';
  for (const auto& p : points) {
    for (std::size_t j = 0; j < p.dimension(); ++j) {
      if (j) cloud += ',';
      cloud += format_real(p.coord(j));
    }
    cloud += '\n';
  }
  sink.file("points.csv", cloud);

  const auto scales = dyadic_scales(c.scale_depth);
  const BoxCountCurve curve = box_count(points, scales);
  Outcome o;
  o.csv = csv_of([&](std::ostream& os) { write_box_count_csv(os, curve); });
  sink.file("boxcount.csv", o.csv);

  o.json["matrix"] = c.matrix;
  o.json["lattice"] = c.lattice;
  o.json["step"] = step_text;
  o.json["points_used"] = curve.points_used;
  o.json["distinct_points"] = curve.distinct_points;
  o.json["counts"] = curve.counts;
  const DimensionEstimate est = box_dimension_fit(curve);
  o.json["slope"] = est.slope;
  o.json["slope_upper"] = est.slope_upper;
  o.json["slope_lower"] = est.slope_lower;
  o.json["fit_residual"] = est.fit_residual;
  o.json["excluded_scales"] = est.excluded;
  sink.file("orbit.json", o.json.dump(2) + "\n");
  return o;
}

Outcome cmd_bounds(const RunConfig& c, const Sink& sink) {
  const int m = c.m == 0 ? 1 : c.m;
  const double d = c.d < 0 ? m + c.n : c.d;
  const BoundBracket b = theoretical_bounds(m, c.n, c.nu, d);
  const double holder = holder_bound(b.upper, c.alpha);
  Outcome o;
  o.csv = "m,n,nu,d,lower,upper,alpha,holder_upper\n" + std::to_string(b.m) + ',' +
          std::to_string(b.n) + ',' + format_real(b.nu) + ',' + format_real(b.d) + ',' +
          format_real(b.lower) + ',' + format_real(b.upper) + ',' + format_real(c.alpha) + ',' +
          format_real(holder) + '\n';
  o.json = {{"m", b.m},         {"n", b.n},         {"nu", b.nu},
            {"d", b.d},         {"lower", b.lower}, {"upper", b.upper},
            {"alpha", c.alpha}, {"holder_upper", holder}};
  sink.file("bounds.csv", o.csv);
  sink.file("bounds.json", o.json.dump(2) + "\n");
  return o;
}

Outcome cmd_almost_period(const RunConfig& c, const Sink& sink) {
  std::int64_t bound = geometric_bound(c.beta, c.k);
  for (double t : c.targets) {
    if (!std::isfinite(t) || std::fabs(t) >= 0x1p62) throw PrecisionError("target out of range");
    bound = std::max(bound, static_cast<std::int64_t>(std::ceil(std::fabs(t))));
  }
  const FrequencyTuple omega = frequency(c, bound);
  const ConvergentSequence seq =
      convergent_sequence(omega, c.beta, c.k, DirichletOptions{true, c.threads});
  const AlmostPeriodQuality q = almost_period_quality(seq, c.k0, c.targets, c.nu);

  Outcome o;
  o.csv = "target,tau,residual,offset,k_top,coefficients\n";
  for (const auto& ap : q.samples) {
    std::string coeffs;
    for (std::size_t i = 0; i < ap.coefficients.size(); ++i) {
      coeffs += (i ? " " : "") + std::to_string(ap.coefficients[i]);
    }
    o.csv += format_real(ap.target) + ',' + std::to_string(ap.tau) + ',' +
             format_real(ap.residual.to_double()) + ',' +
             format_real(std::fabs(static_cast<double>(ap.tau) - ap.target)) + ',' +
             std::to_string(ap.k_top) + ',' + coeffs + '\n';
  }
  o.json = {{"k0", c.k0},
            {"q_k0", seq.q(c.k0)},
            {"eta", q.eta},
            {"max_residual", q.max_residual},
            {"max_offset", q.max_offset},
            {"c2_hat", q.c2_hat},
            {"consistent", q.consistent}};
  sink.file("almost_period.csv", o.csv);
  sink.file("almost_period.json", o.json.dump(2) + "\n");
  return o;
}

Outcome dispatch(const RunConfig& c, const Sink& sink) {
  if (c.command == "convergents") return cmd_convergents(c, sink);
  if (c.command == "scan") return cmd_scan(c, sink);
  if (c.command == "dimension") return cmd_dimension(c, sink);
  if (c.command == "orbit") return cmd_orbit(c, sink);
  if (c.command == "bounds") return cmd_bounds(c, sink);
  if (c.command == "almost-period") return cmd_almost_period(c, sink);
  throw ValidationError("unknown command '" + c.command + "'");
}

}  // namespace

int run_command(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (config.format != "csv" && config.format != "json") {
      throw ValidationError("format must be csv or json");
    }
    std::error_code ec;
    std::filesystem::create_directories(config.out_dir, ec);
    if (ec) throw ValidationError("cannot create output directory " + config.out_dir);
    const Sink sink(config.out_dir);
    sink.file("manifest.json", to_json(config).dump(2) + "\n");

    const Outcome o = dispatch(config, sink);
    if (config.format == "json") {
      out << o.json.dump(2) << '\n';
    } else {
      out << o.csv;
    }
    if (!o.message.empty()) err << "kdim: " << o.message << '\n';
    return o.status;
  } catch (const Error& e) {
    err << "kdim: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    err << "kdim: internal error: " << e.what() << '\n';
    return 1;
  }
}

int kdim_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kronecker systems, inclusion lengths and dimension estimates on the torus"};
  app.fallthrough();
  app.footer(
      "Number descriptors (frequencies, theta, matrix entries, --step):\n"
      "  decimals, golden, pi, e, sqrt(x), zeta(n), parentheses, + - * /\n"
      "  e.g. golden-1, sqrt(2)-1, (1+sqrt(5))/2, 1/3\n"
      "Lists are comma separated; matrix rows are separated by ';'.\n"
      "Exit codes: 0 ok, 2 invalid input, 3 precision guard, 4 budget, 5 insufficient data.");
  RunConfig c;
  std::string manifest;
  std::string eps_text;
  std::string targets_text;

  app.add_option("--manifest", manifest, "Replay the run recorded in a manifest.json");
  auto* out_opt = app.add_option("--out", c.out_dir, "Output directory");
  auto* format_opt = app.add_option("--format", c.format, "Primary output: csv or json");
  auto* threads_opt = app.add_option("--threads", c.threads, "Worker threads (0: all cores)");
  app.add_option("--precision", c.precision, "Precision budget in bits (64..256)");

  const auto add_freq = [&](CLI::App* sub) {
    sub->add_option("--freq", c.freq, "Frequency descriptors, comma separated");
  };
  const auto add_sequence = [&](CLI::App* sub) {
    sub->add_option("--beta", c.beta, "Geometric ratio of the Dirichlet scales");
    sub->add_option("--k", c.k, "Number of terms K");
    sub->add_option("--nu", c.nu, "Diophantine order used for eta");
  };
  const auto add_ladder = [&](CLI::App* sub) {
    add_freq(sub);
    sub->add_option("--theta", c.theta, "Target point, comma separated");
    sub->add_option("--eps", eps_text, "Strictly decreasing epsilon ladder");
    sub->add_option("--min-window", c.min_window, "Smallest initial window");
    sub->add_option("--seed-factor", c.seed_factor, "Initial window is seed * eps^-m");
    sub->add_option("--window-budget", c.window_budget, "Largest window length");
  };

  auto* conv = app.add_subcommand("convergents", "Dirichlet convergent sequence");
  add_freq(conv);
  add_sequence(conv);

  auto* scan = app.add_subcommand("scan", "Inclusion-length ladder");
  add_ladder(scan);

  auto* dimension = app.add_subcommand("dimension", "Diophantine dimension slope and bracket");
  add_ladder(dimension);
  dimension->add_option("--from-csv", c.from_csv, "Fit an existing epsilon,l_hat CSV");
  dimension->add_option("--m", c.m, "m (default: dimension of --freq)");
  dimension->add_option("--n", c.n, "n");
  dimension->add_option("--nu", c.nu, "Diophantine order");
  dimension->add_option("--d", c.d, "Box dimension of the orbit closure (default m+n)");
  dimension->add_option("--tol", c.tol, "Verdict tolerance");

  auto* orbit = app.add_subcommand("orbit", "Orbit sample and box-counting dimension");
  orbit->add_option("--matrix", c.matrix, "Matrix descriptor, rows separated by ';'");
  orbit->add_option("--lattice", c.lattice, "integer or real");
  orbit->add_option("--count", c.count, "Number of samples");
  orbit->add_option("--step", c.step, "Grid spacing descriptor");
  orbit->add_option("--scale-depth", c.scale_depth, "Finest scale 2^-depth");
  orbit->add_option("--sample-budget", c.sample_budget, "Largest allowed count");

  auto* bounds = app.add_subcommand("bounds", "Theoretical dimension bracket");
  bounds->add_option("--m", c.m, "m");
  bounds->add_option("--n", c.n, "n");
  bounds->add_option("--nu", c.nu, "Diophantine order");
  bounds->add_option("--d", c.d, "Box dimension (default m+n)");
  bounds->add_option("--alpha", c.alpha, "Hoelder exponent");

  auto* ap = app.add_subcommand("almost-period", "Greedy almost periods");
  add_freq(ap);
  add_sequence(ap);
  ap->add_option("--k0", c.k0, "Lowest index used");
  ap->add_option("--targets", targets_text, "Targets A, comma separated");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : static_cast<int>(ErrorKind::validation);
  }

  try {
    if (!manifest.empty()) {
      RunConfig replay = load_manifest(manifest);
      replay.out_dir = *out_opt ? c.out_dir : replay.out_dir;
      if (*format_opt) replay.format = c.format;
      if (*threads_opt) replay.threads = c.threads;
      return run_command(replay, out, err);
    }
    const auto chosen = app.get_subcommands();
    if (chosen.empty()) {
      err << app.help();
      return static_cast<int>(ErrorKind::validation);
    }
    c.command = chosen.front()->get_name();
    if (!eps_text.empty()) c.eps = parse_double_list(eps_text);
    if (!targets_text.empty()) c.targets = parse_double_list(targets_text);
  } catch (const Error& e) {
    err << "kdim: " << e.what() << '\n';
    return e.exit_code();
  }
  return run_command(c, out, err);
}

}  // namespace kdim
