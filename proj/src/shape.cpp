#include "brsim/shape.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"

#include "brsim/errors.hpp"

namespace brsim {

namespace {

Grid shape_window(double step, double window) {
  if (!(window >= 4.0)) {
    throw Error(ErrorKind::InvalidWindow, "shape window w=" + std::to_string(window) + " must be at least 4");
  }
  return Grid(window, step);
}

ShapeFunction as_shape(DriftedPath&& path) { return {path.grid, std::move(path.values)}; }

}  // namespace

RejectionShapeSource::RejectionShapeSource(const VariogramModel& model, double step, double window)
    : factor_(std::make_shared<const CovarianceFactor>(build_covariance(model, shape_window(step, window)))) {}

RejectionShapeSource::RejectionShapeSource(std::shared_ptr<const CovarianceFactor> factor)
    : factor_(std::move(factor)) {}

ShapeDraw RejectionShapeSource::draw(RandomStream& rng) const {
  for (std::uint64_t attempt = 1; attempt <= kRejectionBudget; ++attempt) {
    auto path = sample_drifted_path_while(*factor_, rng, argmax_stays_at_origin);
    if (path) return {as_shape(std::move(*path)), attempt};
  }
  throw Error(ErrorKind::RejectionBudgetExceeded,
              std::to_string(kRejectionBudget) + " consecutive rejections in the shape sampler");
}

ShapeFunction sample_shape(const VariogramModel& model, double step, double window, RandomStream& rng) {
  return RejectionShapeSource(model, step, window).draw(rng).shape;
}

double default_shape_window(const VariogramModel& model, double b, double step) {
  model.validate();
  const double growth = model.alpha < 2.0 ? std::pow(2.0 * model.scale, 1.0 / (2.0 - model.alpha))
                                          : (2.0 * model.scale > 1.0 ? INFINITY : 1.0);
  const double w = b + 20.0 * std::max(1.0, growth);
  if (!std::isfinite(w)) {
    throw Error(ErrorKind::InvalidWindow, "default shape window is unbounded for this variogram");
  }
  return static_cast<double>(steps_covering(w, step)) * step;
}

LambdaEstimate estimate_lambda_p(const CovarianceFactor& factor, std::uint64_t n_samples,
                                 RandomStream& rng) {
  const double p = factor.grid().step();
  std::uint64_t accepted = 0;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::uint64_t j = 0; j < n_samples; ++j) {
    // Paths with T != 0 contribute 0 whatever their maximum, so they can be
    // abandoned at the first point that beats the origin.
    auto path = sample_drifted_path_while(factor, rng, argmax_stays_at_origin);
    if (!path) continue;
    ++accepted;
    const double term = std::exp(path->at(0));
    sum += term;
    sum_sq += term * term;
  }
  if (accepted == 0) {
    throw Error(ErrorKind::ZeroAcceptance, "no path out of " + std::to_string(n_samples) + " had its maximum at 0");
  }
  const auto n = static_cast<double>(n_samples);
  const double mean = sum / n;
  const double var = n > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0)) : 0.0;
  LambdaEstimate out;
  out.lambda_p = mean / p;
  out.standard_error = std::sqrt(var / n) / p;
  out.acceptance_rate = static_cast<double>(accepted) / n;
  out.n_samples = n_samples;
  return out;
}

LambdaEstimate estimate_lambda_p(const VariogramModel& model, double step, double window,
                                 std::uint64_t n_samples, RandomStream& rng) {
  return estimate_lambda_p(build_covariance(model, shape_window(step, window)), n_samples, rng);
}

LambdaCache::LambdaCache(std::filesystem::path path) : path_(std::move(path)) {
  std::error_code ec;
  if (!std::filesystem::exists(path_, ec)) return;
  std::ifstream in(path_);
  if (!in) throw Error(ErrorKind::IoError, "cannot read lambda cache " + path_.string());
  try {
    const auto doc = nlohmann::json::parse(in);
    for (const auto& [key, entry] : doc.items()) {
      LambdaEstimate e;
      e.lambda_p = entry.at("lambda_p").get<double>();
      e.standard_error = entry.at("standard_error").get<double>();
      e.acceptance_rate = entry.at("acceptance_rate").get<double>();
      e.n_samples = entry.at("n_samples").get<std::uint64_t>();
      entries_[key] = e;
    }
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::IoError, "malformed lambda cache " + path_.string() + ": " + ex.what());
  }
}

std::string LambdaCache::key(const VariogramModel& model, double step, double window) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "alpha=%.17g;scale=%.17g;p=%.17g;w=%.17g", model.alpha, model.scale, step,
                window);
  return buf;
}

std::optional<LambdaEstimate> LambdaCache::find(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void LambdaCache::put(const std::string& key, const LambdaEstimate& estimate) { entries_[key] = estimate; }

void LambdaCache::save() const {
  nlohmann::json doc = nlohmann::json::object();
  for (const auto& [key, e] : entries_) {
    doc[key] = {{"lambda_p", e.lambda_p},
                {"standard_error", e.standard_error},
                {"acceptance_rate", e.acceptance_rate},
                {"n_samples", e.n_samples}};
  }
  if (path_.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path_.parent_path(), ec);
  }
  std::ofstream out(path_);
  if (!out) throw Error(ErrorKind::IoError, "cannot write lambda cache " + path_.string());
  out << doc.dump(2) << '\n';
  if (!out) throw Error(ErrorKind::IoError, "failed writing lambda cache " + path_.string());
}

}  // namespace brsim
