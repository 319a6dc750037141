#include <fstream>
#include <set>

#include "kdim/cli.hpp"
#include "kdim/errors.hpp"

namespace kdim {

nlohmann::ordered_json to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["artifact_version"] = kArtifactVersion;
  j["command"] = c.command;
  j["freq"] = c.freq;
  j["theta"] = c.theta;
  j["eps"] = c.eps;
  j["beta"] = c.beta;
  j["k"] = c.k;
  j["precision"] = c.precision;
  j["min_window"] = c.min_window;
  j["seed_factor"] = c.seed_factor;
  j["window_budget"] = c.window_budget;
  j["sample_budget"] = c.sample_budget;
  j["matrix"] = c.matrix;
  j["lattice"] = c.lattice;
  j["count"] = c.count;
  j["step"] = c.step;
  j["scale_depth"] = c.scale_depth;
  j["from_csv"] = c.from_csv;
  j["m"] = c.m;
  j["n"] = c.n;
  j["nu"] = c.nu;
  j["d"] = c.d;
  j["tol"] = c.tol;
  j["alpha"] = c.alpha;
  j["k0"] = c.k0;
  j["targets"] = c.targets;
  j["format"] = c.format;
  j["threads"] = c.threads;
  return j;
}

namespace {

template <class T>
void read(const nlohmann::json& j, const char* key, T& field) {
  if (auto it = j.find(key); it != j.end()) field = it->get<T>();
}

}  // namespace

RunConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("manifest must be a JSON object");
  static const std::set<std::string> known{
      "artifact_version", "command", "freq",        "theta",   "eps",         "beta",
      "k",                "precision", "min_window", "seed_factor", "window_budget",
      "sample_budget",    "matrix",  "lattice",     "count",   "step",        "scale_depth",
      "from_csv",         "m",       "n",           "nu",      "d",           "tol",
      "alpha",            "k0",      "targets",     "format",  "threads"};
  for (const auto& item : j.items()) {
    if (!known.count(item.key())) throw ValidationError("unknown manifest key: " + item.key());
  }
  RunConfig c;
  try {
    read(j, "command", c.command);
    read(j, "freq", c.freq);
    read(j, "theta", c.theta);
    read(j, "eps", c.eps);
    read(j, "beta", c.beta);
    read(j, "k", c.k);
    read(j, "precision", c.precision);
    read(j, "min_window", c.min_window);
    read(j, "seed_factor", c.seed_factor);
    read(j, "window_budget", c.window_budget);
    read(j, "sample_budget", c.sample_budget);
    read(j, "matrix", c.matrix);
    read(j, "lattice", c.lattice);
    read(j, "count", c.count);
    read(j, "step", c.step);
    read(j, "scale_depth", c.scale_depth);
    read(j, "from_csv", c.from_csv);
    read(j, "m", c.m);
    read(j, "n", c.n);
    read(j, "nu", c.nu);
    read(j, "d", c.d);
    read(j, "tol", c.tol);
    read(j, "alpha", c.alpha);
    read(j, "k0", c.k0);
    read(j, "targets", c.targets);
    read(j, "format", c.format);
    read(j, "threads", c.threads);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed manifest: ") + e.what());
  }
  if (auto it = j.find("artifact_version"); it != j.end() && *it != kArtifactVersion) {
    throw ValidationError("manifest was written by artifact version " + it->dump() +
                          ", this is " + kArtifactVersion);
  }
  return c;
}

RunConfig load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open manifest " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("manifest " + path + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

}  // namespace kdim
