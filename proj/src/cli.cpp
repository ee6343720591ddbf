#include "brsim/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "brsim/bounds.hpp"
#include "brsim/errors.hpp"
#include "brsim/methods.hpp"
#include "brsim/shape.hpp"
#include "brsim/stats.hpp"
#include "brsim/study.hpp"

namespace brsim {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigError, "malformed JSON in " + path + ": " + e.what());
  }
}

// Opens `path` for writing, or returns nullptr for "-" / empty (use stdout).
std::unique_ptr<std::ofstream> open_output(const std::string& path) {
  if (path.empty() || path == "-") return nullptr;
  const fs::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
  }
  auto file = std::make_unique<std::ofstream>(p);
  if (!*file) throw Error(ErrorKind::IoError, "cannot write " + path);
  return file;
}

fs::path default_cache_path() {
  if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg) return fs::path(xdg) / "brsim" / "lambda.json";
  if (const char* home = std::getenv("HOME"); home && *home) return fs::path(home) / ".cache" / "brsim" / "lambda.json";
  return fs::path("brsim_lambda.json");
}

// Options shared by simulate / study / lambda.
struct ModelOptions {
  std::optional<double> alpha, scale, b, step;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> margins;
  std::optional<std::string> config;
  std::optional<std::string> cache;
  bool no_cache = false;
};

void add_model_options(CLI::App* app, ModelOptions& o, bool with_alpha = true) {
  if (with_alpha) app->add_option("--alpha", o.alpha, "variogram exponent in (0, 2]");
  app->add_option("--scale", o.scale, "variogram scale s in gamma(h) = s |h|^alpha");
  app->add_option("--b", o.b, "grid half width");
  app->add_option("--step", o.step, "grid step p");
  app->add_option("--seed", o.seed, "master seed");
  app->add_option("--margins", o.margins, "gumbel or frechet")->check(CLI::IsMember({"gumbel", "frechet"}));
  app->add_option("--config", o.config, "JSON config file; flags override its fields");
  app->add_option("--cache", o.cache, "lambda cache file");
  app->add_flag("--no-cache", o.no_cache, "re-estimate lambda_p instead of reading the cache");
}

template <class T>
T pick(const std::optional<T>& flag, const json& doc, const char* key, T fallback) {
  if (flag) return *flag;
  if (doc.contains(key)) {
    try {
      return doc.at(key).get<T>();
    } catch (const json::exception&) {
      throw Error(ErrorKind::ConfigError, std::string("field '") + key + "' has the wrong type");
    }
  }
  return fallback;
}

// Looks up or estimates lambda_p for a method-4 run and stores new estimates.
void attach_lambda(MethodConfig& mc, const VariogramModel& model, const Grid& grid, const ModelOptions& o) {
  if (mc.method != 4 || mc.lambda_p) return;
  const MethodConfig resolved = resolve(mc, grid);
  const double w = path_window_half_width(model, grid, resolved);
  LambdaCache cache(o.cache ? fs::path(*o.cache) : default_cache_path());
  const std::string key = LambdaCache::key(model, grid.step(), w);
  if (!o.no_cache) {
    if (const auto hit = cache.find(key)) {
      mc.lambda_p = hit->lambda_p;
      return;
    }
  }
  auto source = std::make_shared<const RejectionShapeSource>(model, grid.step(), w);
  RandomStream rng(SubstreamKey{.seed = 0, .cell = 0, .method = 4, .replication = SubstreamKey::kPilotReplication});
  const auto estimate = estimate_lambda_p(source->factor(), mc.lambda_samples, rng);
  mc.lambda_p = estimate.lambda_p;
  cache.put(key, estimate);
  cache.save();
}

int cmd_simulate(const ModelOptions& o, const MethodConfig& flags_mc, bool method_given, std::optional<std::uint64_t> k,
                 std::uint64_t reps, const std::string& out_path, std::ostream& out) {
  const json doc = o.config ? read_json_file(*o.config) : json::object();
  MethodConfig mc = doc.contains("method_config") ? method_config_from_json(doc["method_config"]) : MethodConfig{};
  mc.method = method_given ? flags_mc.method : pick<int>(std::nullopt, doc, "method", mc.method);
  if (k || doc.contains("k")) {
    mc.k_max = pick<std::uint64_t>(k, doc, "k", 0);
    mc.adaptive = false;
  }
  mc.margins = parse_margins(pick<std::string>(o.margins, doc, "margins", "gumbel"));
  const VariogramModel model{pick(o.alpha, doc, "alpha", 1.0), pick(o.scale, doc, "scale", 0.5)};
  model.validate();
  const Grid grid(pick(o.b, doc, "b", 2.0), pick(o.step, doc, "step", 0.1));
  const std::uint64_t seed = pick(o.seed, doc, "seed", std::uint64_t{1});
  if (reps < 1) throw Error(ErrorKind::ConfigError, "reps must be at least 1");
  attach_lambda(mc, model, grid, o);

  const Generator generator(model, grid, mc, seed);
  auto file = open_output(out_path);
  std::ostream& sink = file ? *file : out;
  sink << (reps == 1 ? "t,z\n" : "rep,t,z\n");
  for (std::uint64_t r = 0; r < reps; ++r) {
    const auto field = generator.run(r);
    for (std::int64_t i = -grid.half_count(); i <= grid.half_count(); ++i) {
      if (reps > 1) sink << r << ',';
      sink << number(grid.point(i)) << ',' << number(field.at(i)) << '\n';
    }
  }
  if (!sink) throw Error(ErrorKind::IoError, "failed writing " + out_path);
  return kExitOk;
}

int cmd_study(const ModelOptions& o, const std::vector<int>& methods, const std::vector<double>& alphas,
              std::optional<std::uint64_t> reps, std::optional<unsigned> threads, bool timing,
              const std::string& out_dir, std::ostream& out) {
  const json doc = o.config ? read_json_file(*o.config) : json::object();
  StudyConfig config = study_config_from_json(doc);
  if (!methods.empty()) {
    config.methods.clear();
    for (const int m : methods) {
      MethodConfig mc;
      mc.method = m;
      config.methods.push_back(mc);
    }
  }
  if (!alphas.empty()) config.alphas = alphas;
  if (o.scale) config.scale = *o.scale;
  if (o.b) config.b = *o.b;
  if (o.step) config.p = *o.step;
  if (reps) config.N = *reps;
  if (o.seed) config.seed = *o.seed;
  if (o.margins) config.margins = parse_margins(*o.margins);
  if (threads) config.threads = *threads;
  if (o.no_cache) {
    config.lambda_cache.reset();
  } else if (o.cache) {
    config.lambda_cache = *o.cache;
  } else if (!config.lambda_cache) {
    config.lambda_cache = default_cache_path();
  }

  const auto result = run_study(config);
  const fs::path dir(out_dir.empty() ? "." : out_dir);
  auto csv = open_output((dir / "study.csv").string());
  write_study_csv(result, *csv, timing);
  auto js = open_output((dir / "study.json").string());
  *js << study_json(result).dump(2) << '\n';
  if (!*csv || !*js) throw Error(ErrorKind::IoError, "failed writing study output in " + dir.string());
  write_study_csv(result, out, timing);
  return kExitOk;
}

void print_budget_table(const ErrorBudget& e, std::ostream& out) {
  const std::vector<std::pair<std::string, double>> rows = {{"conditional", e.conditional},
                                                            {"low_event", e.low_event},
                                                            {"high_event", e.high_event},
                                                            {"total", e.total},
                                                            {"total_clamped", e.total_clamped},
                                                            {"log_high_event", e.log_high_event}};
  for (const auto& [name, value] : rows) {
    out << std::left << std::setw(16) << name << std::right << std::setw(26) << number(value) << '\n';
  }
}

int cmd_bounds(int method, const BoundParams& params, bool json_only, std::ostream& out) {
  const auto e = method_error_bound(method, params);
  json params_json = json::object();
  for (const auto& [k, v] : e.params) params_json[k] = v;
  const json doc = {{"conditional", e.conditional},
                    {"low_event", e.low_event},
                    {"high_event", e.high_event},
                    {"total", e.total},
                    {"total_clamped", e.total_clamped},
                    {"log_high_event", e.log_high_event},
                    {"sharp", params.sharp},
                    {"params", params_json}};
  out << doc.dump(2) << '\n';
  if (!json_only) {
    out << '\n';
    print_budget_table(e, out);
  }
  return kExitOk;
}

int cmd_lambda(const ModelOptions& o, std::optional<double> window, std::uint64_t samples, std::ostream& out) {
  const json doc = o.config ? read_json_file(*o.config) : json::object();
  const VariogramModel model{pick(o.alpha, doc, "alpha", 1.0), pick(o.scale, doc, "scale", 0.5)};
  model.validate();
  const double p = pick(o.step, doc, "step", 0.1);
  const double b = pick(o.b, doc, "b", 2.0);
  const double w = window ? static_cast<double>(steps_covering(*window, p)) * p : default_shape_window(model, b, p);
  LambdaCache cache(o.cache ? fs::path(*o.cache) : default_cache_path());
  const std::string key = LambdaCache::key(model, p, w);
  std::optional<LambdaEstimate> estimate;
  bool cached = false;
  if (!o.no_cache) {
    estimate = cache.find(key);
    cached = estimate.has_value();
  }
  if (!estimate) {
    RandomStream rng(SubstreamKey{.seed = pick(o.seed, doc, "seed", std::uint64_t{1}), .cell = 0, .method = 4,
                                  .replication = SubstreamKey::kPilotReplication});
    estimate = estimate_lambda_p(model, p, w, samples, rng);
    cache.put(key, *estimate);
    cache.save();
  }
  const json result = {{"alpha", model.alpha},
                       {"scale", model.scale},
                       {"step", p},
                       {"window", w},
                       {"lambda_p", estimate->lambda_p},
                       {"lambda_p_times_p", estimate->lambda_p * p},
                       {"standard_error", estimate->standard_error},
                       {"acceptance_rate", estimate->acceptance_rate},
                       {"n_samples", estimate->n_samples},
                       {"cached", cached}};
  out << result.dump(2) << '\n';
  return kExitOk;
}

// Samples per grid point from a simulate CSV ("t,z" or "rep,t,z").
std::map<double, std::vector<double>> read_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot read " + path);
  std::string line;
  std::getline(in, line);
  const bool with_rep = line.rfind("rep,", 0) == 0;
  if (!with_rep && line != "t,z") throw Error(ErrorKind::ConfigError, path + ": expected header 't,z' or 'rep,t,z'");
  std::map<double, std::vector<double>> samples;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string a, b, c;
    std::getline(row, a, ',');
    std::getline(row, b, ',');
    if (with_rep) std::getline(row, c, ',');
    try {
      const double t = std::stod(with_rep ? b : a);
      samples[t].push_back(std::stod(with_rep ? c : b));
    } catch (const std::exception&) {
      throw Error(ErrorKind::ConfigError, path + ": malformed row '" + line + "'");
    }
  }
  if (samples.empty()) throw Error(ErrorKind::EmptySample, path + " has no samples");
  return samples;
}

int cmd_check(const std::string& in_path, const std::string& margins_text, std::size_t block, std::ostream& out) {
  auto samples = read_samples(in_path);
  if (parse_margins(margins_text) == Margins::Frechet) {
    for (auto& [t, v] : samples) {
      for (double& x : v) x = std::log(x);
    }
  }
  auto& lo = samples.begin()->second;
  auto& mid = samples.count(0.0) ? samples[0.0] : samples.begin()->second;
  auto& hi = samples.rbegin()->second;
  const auto dev = dev_summary(lo, mid, hi);
  json doc = {{"n_reps", dev.n_reps},     {"dev_a", dev.dev_a}, {"dev_0", dev.dev_0},
              {"dev_b", dev.dev_b},       {"DEV", dev.DEV},     {"t_a", samples.begin()->first},
              {"t_b", samples.rbegin()->first}};

  const std::size_t n = mid.size();
  const std::size_t blocks = n / (block + 1);
  if (blocks >= 1) {
    const std::span<const double> used(mid.data(), blocks * (block + 1));
    const double stat = max_stability_check(used, block);
    const double crit = ks_critical(blocks, blocks);
    doc["max_stability"] = {{"block", block}, {"blocks", blocks}, {"ks", stat}, {"critical", crit}, {"pass", stat < crit}};
  }
  if (n >= 2 && lo.size() == hi.size()) {
    const std::size_t half = n / 2;
    const std::span<const double> first(lo.data(), half);
    const std::span<const double> second(hi.data() + half, hi.size() - half);
    const double stat = ks_two_sample(first, second);
    const double crit = ks_critical(first.size(), second.size());
    doc["stationarity"] = {{"ks", stat}, {"critical", crit}, {"pass", stat < crit}};
  }
  out << doc.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Brown-Resnick process simulation on one-dimensional grids", "brsim"};
  app.require_subcommand(1);

  ModelOptions sim_o;
  int sim_method = 0;
  std::optional<std::uint64_t> sim_k;
  std::uint64_t sim_reps = 1;
  std::string sim_out;
  std::uint64_t sim_lambda_samples = MethodConfig{}.lambda_samples;
  auto* sim = app.add_subcommand("simulate", "write one realization as t,z CSV");
  auto* sim_method_opt = sim->add_option("--method", sim_method, "generator 0..4");
  sim->add_option("--k", sim_k, "fixed path budget (disables adaptive stopping)");
  sim->add_option("--reps", sim_reps, "number of realizations (rep,t,z rows when > 1)");
  sim->add_option("--out", sim_out, "output file (default: stdout)");
  sim->add_option("--lambda-samples", sim_lambda_samples, "paths for a fresh lambda_p estimate (method 4)");
  add_model_options(sim, sim_o);

  ModelOptions study_o;
  std::vector<int> study_methods;
  std::vector<double> study_alphas;
  std::optional<std::uint64_t> study_reps;
  std::optional<unsigned> study_threads;
  bool study_timing = false;
  std::string study_out = ".";
  auto* study = app.add_subcommand("study", "dev(a), dev(0), dev(b), DEV per method and alpha");
  study->add_option("--method", study_methods, "methods to run (repeatable; default 0..4)");
  study->add_option("--alpha", study_alphas, "alpha values (repeatable; default 0.1 0.5 1 1.5 1.9)");
  study->add_option("--reps", study_reps, "replications N per cell");
  study->add_option("--threads", study_threads, "worker threads");
  study->add_flag("--timing", study_timing, "append mean_runtime_s to the CSV");
  study->add_option("--out", study_out, "output directory for study.csv and study.json");
  add_model_options(study, study_o, false);

  int bounds_method = 0;
  BoundParams bp;
  std::optional<double> bounds_c, bounds_x;
  bool bounds_json = false;
  auto* bounds = app.add_subcommand("bounds", "evaluate the error budget of a method");
  bounds->add_option("--method", bounds_method, "method 0..4");
  bounds->add_option("--b", bp.b, "grid half width");
  bounds->add_option("--k", bp.k, "path budget");
  bounds->add_option("--step", bp.p, "lattice step p (methods 3, 4)");
  bounds->add_option("--c", bounds_c, "c(k); default from the schedule");
  bounds->add_option("--x", bounds_x, "x(k); default from the schedule");
  bounds->add_option("--shifts", bp.shifts, "method 1 shifts")->delimiter(',');
  bounds->add_option("--v", bp.v, "method 2 interval half width / method 4 window");
  bounds->add_option("--jmax", bp.j_max, "method 3 j_max");
  bounds->add_option("--lambda", bp.lambda_p, "method 4 lambda_p");
  bounds->add_flag("--sharp", bp.sharp, "use the sharp conditional bound (methods 3, 4)");
  bounds->add_flag("--json", bounds_json, "print only the JSON object");

  ModelOptions lambda_o;
  std::optional<double> lambda_window;
  std::uint64_t lambda_samples = 100000;
  auto* lambda = app.add_subcommand("lambda", "estimate lambda_p");
  lambda->add_option("--window", lambda_window, "argmax window w (default from b and the variogram)");
  lambda->add_option("--samples", lambda_samples, "number of paths");
  add_model_options(lambda, lambda_o);

  std::string check_in;
  std::string check_margins = "gumbel";
  std::size_t check_block = 5;
  auto* check = app.add_subcommand("check", "stats suite on a simulate CSV");
  check->add_option("--in", check_in, "CSV written by simulate")->required();
  check->add_option("--margins", check_margins, "margins of the stored values")
      ->check(CLI::IsMember({"gumbel", "frechet"}));
  check->add_option("--block", check_block, "block size for the max-stability check");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (sim->parsed()) {
      MethodConfig mc;
      mc.method = sim_method;
      mc.lambda_samples = sim_lambda_samples;
      return cmd_simulate(sim_o, mc, sim_method_opt->count() > 0, sim_k, sim_reps, sim_out, out);
    }
    if (study->parsed()) {
      return cmd_study(study_o, study_methods, study_alphas, study_reps, study_threads, study_timing, study_out, out);
    }
    if (bounds->parsed()) {
      bp.c = bounds_c;
      bp.x = bounds_x;
      return cmd_bounds(bounds_method, bp, bounds_json, out);
    }
    if (lambda->parsed()) return cmd_lambda(lambda_o, lambda_window, lambda_samples, out);
    return cmd_check(check_in, check_margins, check_block, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::IoError ? kExitIo : kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace brsim
