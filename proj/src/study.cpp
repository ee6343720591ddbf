#include "brsim/study.hpp"

#include <chrono>
#include <cstdio>
#include <ostream>
#include <set>
#include <string>

#include "brsim/errors.hpp"
#include "brsim/parallel.hpp"
#include "brsim/shape.hpp"

namespace brsim {

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorKind::ConfigError, what); }

template <class T>
T field(const json& doc, const char* name) {
  try {
    return doc.at(name).get<T>();
  } catch (const json::exception&) {
    config_error(std::string("field '") + name + "' has the wrong type");
  }
}

void reject_unknown(const json& doc, const std::set<std::string>& known, const char* where) {
  for (const auto& [key, value] : doc.items()) {
    if (!known.count(key)) config_error(std::string("unknown field '") + key + "' in " + where);
  }
}

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

MethodConfig method_config_from_json(const json& doc) {
  MethodConfig m;
  if (doc.is_number_integer()) {
    m.method = doc.get<int>();
    return m;
  }
  if (!doc.is_object()) config_error("methods entries must be integers or objects");
  reject_unknown(doc,
                 {"method", "k_max", "adaptive", "shifts", "v", "j_max", "lambda_p", "shape_window",
                  "lambda_samples"},
                 "method config");
  if (!doc.contains("method")) config_error("method config needs field 'method'");
  m.method = field<int>(doc, "method");
  if (doc.contains("k_max")) m.k_max = field<std::uint64_t>(doc, "k_max");
  if (doc.contains("adaptive")) m.adaptive = field<bool>(doc, "adaptive");
  if (doc.contains("shifts")) m.shifts = field<std::vector<double>>(doc, "shifts");
  if (doc.contains("v")) {
    const double v = field<double>(doc, "v");
    if (m.method == 2) m.translation_half_width = v;
    m.window = v;
  }
  if (doc.contains("j_max")) m.j_max = field<std::int64_t>(doc, "j_max");
  if (doc.contains("lambda_p")) m.lambda_p = field<double>(doc, "lambda_p");
  if (doc.contains("shape_window")) m.shape_window = field<double>(doc, "shape_window");
  if (doc.contains("lambda_samples")) m.lambda_samples = field<std::uint64_t>(doc, "lambda_samples");
  return m;
}

StudyConfig study_config_from_json(const json& doc) {
  if (!doc.is_object()) config_error("study config must be a JSON object");
  reject_unknown(doc, {"methods", "alphas", "scale", "b", "step", "reps", "seed", "margins", "threads", "lambda_cache"},
                 "study config");
  StudyConfig c;
  if (doc.contains("methods")) {
    if (!doc["methods"].is_array()) config_error("field 'methods' must be an array");
    for (const auto& m : doc["methods"]) c.methods.push_back(method_config_from_json(m));
  }
  if (doc.contains("alphas")) c.alphas = field<std::vector<double>>(doc, "alphas");
  if (doc.contains("scale")) c.scale = field<double>(doc, "scale");
  if (doc.contains("b")) c.b = field<double>(doc, "b");
  if (doc.contains("step")) c.p = field<double>(doc, "step");
  if (doc.contains("reps")) c.N = field<std::uint64_t>(doc, "reps");
  if (doc.contains("seed")) c.seed = field<std::uint64_t>(doc, "seed");
  if (doc.contains("margins")) c.margins = parse_margins(field<std::string>(doc, "margins"));
  if (doc.contains("threads")) c.threads = field<unsigned>(doc, "threads");
  if (doc.contains("lambda_cache")) c.lambda_cache = field<std::string>(doc, "lambda_cache");
  return c;
}

StudyConfig validated(StudyConfig config) {
  if (config.N < 1) config_error("reps must be at least 1");
  if (config.alphas.empty()) config_error("alphas must not be empty");
  for (const double a : config.alphas) {
    if (!(a > 0.0 && a <= 2.0)) config_error("alpha " + number(a) + " is outside (0, 2]");
  }
  if (!(config.scale > 0.0)) config_error("scale must be positive");
  if (config.methods.empty()) {
    for (int m = 0; m <= 4; ++m) {
      MethodConfig mc;
      mc.method = m;
      config.methods.push_back(mc);
    }
  }
  const Grid grid(config.b, config.p);
  for (auto& m : config.methods) {
    m.margins = config.margins;
    resolve(m, grid);
  }
  if (config.threads == 0) config.threads = default_threads();
  return config;
}

StudyResult run_study(const StudyConfig& input) {
  StudyResult result;
  result.config = validated(input);
  const StudyConfig& config = result.config;
  const Grid grid(config.b, config.p);

  std::optional<LambdaCache> cache;
  if (config.lambda_cache) cache.emplace(*config.lambda_cache);
  bool cache_dirty = false;

  std::uint64_t cell = 0;
  for (const auto& method : config.methods) {
    for (const double alpha : config.alphas) {
      const VariogramModel model{alpha, config.scale};
      MethodConfig mc = method;
      std::string cache_key;
      if (mc.method == 4 && !mc.lambda_p && cache) {
        const MethodConfig resolved = resolve(mc, grid);
        const double w = path_window_half_width(model, grid, resolved);
        cache_key = LambdaCache::key(model, config.p, w);
        if (const auto hit = cache->find(cache_key)) mc.lambda_p = hit->lambda_p;
      }
      const Generator generator(model, grid, mc, config.seed, cell);
      if (!cache_key.empty() && generator.lambda_estimate()) {
        cache->put(cache_key, *generator.lambda_estimate());
        cache_dirty = true;
      }

      std::vector<std::optional<FieldRealization>> slots(config.N);
      std::vector<double> seconds(config.N);
      parallel_for(config.N, config.threads, [&](std::size_t r) {
        const auto start = std::chrono::steady_clock::now();
        slots[r] = generator.run(r);
        seconds[r] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      });

      std::vector<FieldRealization> fields;
      fields.reserve(config.N);
      for (auto& slot : slots) fields.push_back(std::move(*slot));

      StudyRow row;
      row.method = mc.method;
      row.alpha = alpha;
      row.dev = dev_summary(fields);
      row.lambda_p = generator.lambda_p();
      double paths = 0.0;
      double runtime = 0.0;
      row.min_paths = static_cast<double>(fields.front().paths_used);
      for (std::size_t r = 0; r < fields.size(); ++r) {
        const auto used = static_cast<double>(fields[r].paths_used);
        paths += used;
        runtime += seconds[r];
        row.min_paths = std::min(row.min_paths, used);
        row.max_paths = std::max(row.max_paths, used);
      }
      row.mean_paths = paths / static_cast<double>(config.N);
      row.mean_runtime_s = runtime / static_cast<double>(config.N);
      result.rows.push_back(row);
      ++cell;
    }
  }
  if (cache && cache_dirty) cache->save();
  return result;
}

void write_study_csv(const StudyResult& result, std::ostream& out, bool timing) {
  const auto& c = result.config;
  out << "method,alpha,scale,b,p,N,dev_a,dev_0,dev_b,DEV,mean_paths";
  if (timing) out << ",mean_runtime_s";
  out << '\n';
  for (const auto& row : result.rows) {
    out << row.method << ',' << number(row.alpha) << ',' << number(c.scale) << ',' << number(c.b) << ','
        << number(c.p) << ',' << c.N << ',' << number(row.dev.dev_a) << ',' << number(row.dev.dev_0) << ','
        << number(row.dev.dev_b) << ',' << number(row.dev.DEV) << ',' << number(row.mean_paths);
    if (timing) out << ',' << number(row.mean_runtime_s);
    out << '\n';
  }
}

json study_json(const StudyResult& result) {
  const auto& c = result.config;
  json rows = json::array();
  for (const auto& row : result.rows) {
    json r = {{"method", row.method},
              {"alpha", row.alpha},
              {"dev_a", row.dev.dev_a},
              {"dev_0", row.dev.dev_0},
              {"dev_b", row.dev.dev_b},
              {"DEV", row.dev.DEV},
              {"n_reps", row.dev.n_reps},
              {"mean_runtime_s", row.mean_runtime_s},
              {"mean_paths", row.mean_paths},
              {"min_paths", row.min_paths},
              {"max_paths", row.max_paths}};
    if (row.lambda_p) r["lambda_p"] = *row.lambda_p;
    rows.push_back(r);
  }
  json methods = json::array();
  for (const auto& m : c.methods) methods.push_back(m.method);
  return {{"seed", c.seed},  {"scale", c.scale},   {"b", c.b},
          {"step", c.p},     {"reps", c.N},        {"margins", to_string(c.margins)},
          {"alphas", c.alphas}, {"methods", methods}, {"rows", rows}};
}

}  // namespace brsim
