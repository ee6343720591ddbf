#include "brsim/methods.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "brsim/errors.hpp"
#include "brsim/ppp.hpp"

namespace brsim {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::uint64_t kPilotPaths = 10000;

std::int64_t lattice_index(double t, double step, const char* field) {
  const double ratio = t / step;
  const double rounded = std::round(ratio);
  if (std::fabs(ratio - rounded) > 1e-9 * std::max(1.0, std::fabs(ratio))) {
    throw Error(ErrorKind::InvalidLattice,
                std::string(field) + "=" + std::to_string(t) + " is not a multiple of p=" + std::to_string(step));
  }
  return static_cast<std::int64_t>(rounded);
}

// Running field max(Z, x + f(n - shift)) plus its minimum C.
class Accumulator {
 public:
  Accumulator(const Grid& grid) : grid_(grid), z_(grid.size(), kNegInf) {}

  template <class Path>
  void add(double x, const Path& path, std::int64_t shift) {
    const std::int64_t n = grid_.half_count();
    double c = std::numeric_limits<double>::infinity();
    for (std::int64_t i = -n; i <= n; ++i) {
      double& z = z_[grid_.offset(i)];
      z = std::max(z, x + path.at(i - shift));
      c = std::min(c, z);
    }
    c_ = c;
  }

  double c() const noexcept { return c_; }

  FieldRealization finish(std::uint64_t paths, StopReason reason, Margins margins) {
    if (margins == Margins::Frechet) {
      for (double& v : z_) v = std::exp(v);
    }
    return {grid_, std::move(z_), paths, reason, margins};
  }

 private:
  Grid grid_;
  std::vector<double> z_;
  double c_ = kNegInf;
};

}  // namespace

std::string to_string(Margins margins) { return margins == Margins::Gumbel ? "gumbel" : "frechet"; }

std::string to_string(StopReason reason) { return reason == StopReason::FixedK ? "fixed_k" : "adaptive"; }

Margins parse_margins(const std::string& text) {
  if (text == "gumbel") return Margins::Gumbel;
  if (text == "frechet") return Margins::Frechet;
  throw Error(ErrorKind::ConfigError, "margins must be gumbel or frechet, got '" + text + "'");
}

MethodConfig resolve(MethodConfig config, const Grid& grid) {
  const double b = grid.half_width();
  const double p = grid.step();
  if (config.method < 0 || config.method > 4) {
    throw Error(ErrorKind::ConfigError, "method must be 0..4, got " + std::to_string(config.method));
  }
  if (config.k_max < 1) throw Error(ErrorKind::ConfigError, "k_max must be at least 1");

  switch (config.method) {
    case 1:
      if (config.shifts.empty()) config.shifts = {-b, 0.0, b};
      for (const double h : config.shifts) lattice_index(h, p, "shift");
      break;
    case 2:
      if (config.translation_half_width == 0.0) config.translation_half_width = b;
      if (!(config.translation_half_width > 0.0)) {
        throw Error(ErrorKind::EmptyMarkSpace, "translation interval half width must be positive");
      }
      break;
    case 3: {
      if (config.m != 1) throw Error(ErrorKind::ConfigError, "m must be 1, got " + std::to_string(config.m));
      if (config.j_max == 0) config.j_max = static_cast<std::int64_t>(std::lround((b + 10.0) / p));
      if (config.j_min == 0) config.j_min = -config.j_max;
      if (config.j_min != -config.j_max) {
        throw Error(ErrorKind::InvalidLattice, "j_min must equal -j_max");
      }
      if (config.j_max < grid.half_count()) {
        throw Error(ErrorKind::ConfigError, "j_max must be at least b/p = " + std::to_string(grid.half_count()));
      }
      break;
    }
    case 4:
      if (config.window == 0.0) config.window = b + 10.0;
      if (config.window < b) {
        throw Error(ErrorKind::InvalidWindow,
                    "window v=" + std::to_string(config.window) + " is smaller than b=" + std::to_string(b));
      }
      if (config.lambda_p && !(*config.lambda_p > 0.0)) {
        throw Error(ErrorKind::ConfigError, "lambda_p must be positive");
      }
      break;
    default:
      break;
  }
  return config;
}

double max_quantile(const CovarianceFactor& factor, std::uint64_t n_paths, const SubstreamKey& pilot,
                    Drift drift, double level) {
  std::vector<double> maxima;
  maxima.reserve(n_paths);
  SubstreamKey key = pilot;
  for (std::uint64_t i = 0; i < n_paths; ++i) {
    key.path = i;
    RandomStream rng(key);
    const auto path = sample_drifted_path(factor, rng, drift);
    maxima.push_back(*std::max_element(path.values.begin(), path.values.end()));
  }
  const auto rank = std::min<std::size_t>(
      maxima.size() - 1, static_cast<std::size_t>(std::ceil(level * static_cast<double>(maxima.size()))) - 1);
  std::nth_element(maxima.begin(), maxima.begin() + static_cast<std::ptrdiff_t>(rank), maxima.end());
  return maxima[rank];
}

double path_window_half_width(const VariogramModel& model, const Grid& grid, const MethodConfig& config) {
  const double b = grid.half_width();
  const double p = grid.step();
  const std::int64_t n = grid.half_count();
  switch (config.method) {
    case 1: {
      std::int64_t widest = 0;
      for (const double h : config.shifts) widest = std::max<std::int64_t>(widest, std::llabs(lattice_index(h, p, "shift")));
      return static_cast<double>(n + widest) * p;
    }
    case 2:
      return static_cast<double>(n + steps_covering(config.translation_half_width, p)) * p;
    case 3:
    case 4: {
      const std::int64_t reach =
          config.method == 3 ? n + config.j_max : n + static_cast<std::int64_t>(std::floor(config.window / p + 1e-9));
      if (config.shape_window == 0.0) {
        return std::max(default_shape_window(model, b, p), static_cast<double>(reach) * p);
      }
      if (steps_covering(config.shape_window, p) < reach) {
        throw Error(ErrorKind::InvalidWindow, "shape window " + std::to_string(config.shape_window) +
                                                  " does not cover " + std::to_string(static_cast<double>(reach) * p));
      }
      return static_cast<double>(steps_covering(config.shape_window, p)) * p;
    }
    default:
      return b;
  }
}

Generator::Generator(const VariogramModel& model, const Grid& grid, const MethodConfig& config,
                     std::uint64_t seed, std::uint64_t cell, std::shared_ptr<const ShapeSource> shapes)
    : model_(model), grid_(grid), config_(resolve(config, grid)), seed_(seed), cell_(cell) {
  model_.validate();
  const double p = grid_.step();

  if (config_.method == 4 && shapes) {
    const Grid& w = shapes->window();
    const std::int64_t reach = grid_.half_count() + static_cast<std::int64_t>(std::floor(config_.window / p + 1e-9));
    if (std::fabs(w.step() - p) > 1e-12 * p || w.half_count() < reach) {
      throw Error(ErrorKind::InvalidWindow, "shape source window does not cover b + v on the grid lattice");
    }
    config_.shape_window = w.half_width();
    shapes_ = std::move(shapes);
  } else {
    const std::int64_t half = steps_covering(path_window_half_width(model_, grid_, config_), p);
    if (config_.method >= 3) config_.shape_window = static_cast<double>(half) * p;
    factor_ = std::make_shared<const CovarianceFactor>(build_covariance(model_, Grid::from_half_count(p, half)));
  }

  if (config_.method <= 2) {
    if (config_.adaptive) {
      q_hi_ = max_quantile(*factor_, kPilotPaths, key(SubstreamKey::kPilotReplication, 0, 0), config_.drift);
    }
  } else if (config_.method == 4) {
    if (!shapes_) {
      shapes_ = std::make_shared<const RejectionShapeSource>(factor_);
    }
    if (!config_.lambda_p) {
      if (!factor_) {
        throw Error(ErrorKind::ConfigError, "lambda_p must be supplied together with a custom shape source");
      }
      RandomStream rng(key(SubstreamKey::kPilotReplication, 0, 0));
      lambda_estimate_ = estimate_lambda_p(*factor_, config_.lambda_samples, rng);
      config_.lambda_p = lambda_estimate_->lambda_p;
    }
  }
}

const Grid& Generator::path_window() const { return factor_ ? factor_->grid() : shapes_->window(); }

SubstreamKey Generator::key(std::uint64_t replication, std::uint64_t block, std::uint64_t path) const {
  return {seed_, cell_, static_cast<std::uint64_t>(config_.method), replication, block, path};
}

FieldRealization Generator::run(std::uint64_t replication) const { return run_impl(replication, true); }

FieldRealization Generator::run_unstopped(std::uint64_t replication) const {
  return run_impl(replication, false);
}

FieldRealization Generator::run_impl(std::uint64_t replication, bool stop) const {
  switch (config_.method) {
    case 0: return method0(replication);
    case 1: return method1(replication);
    case 2: return method2(replication);
    case 3: return method3(replication, stop && config_.adaptive);
    default: return method4(replication, stop && config_.adaptive);
  }
}

FieldRealization Generator::method0(std::uint64_t replication) const {
  RandomStream points(key(replication, 0, SubstreamKey::kPointStreamSlot));
  GumbelPointStream stream(1.0);
  Accumulator acc(grid_);
  StopReason reason = StopReason::FixedK;
  std::uint64_t k = 0;
  while (k < config_.k_max) {
    const double x = stream.next(points);
    if (config_.adaptive && x + q_hi_ < acc.c()) {
      reason = StopReason::Adaptive;
      break;
    }
    RandomStream rng(key(replication, 0, k));
    acc.add(x, sample_drifted_path(*factor_, rng, config_.drift), 0);
    ++k;
  }
  return acc.finish(k, reason, config_.margins);
}

FieldRealization Generator::method1(std::uint64_t replication) const {
  const std::size_t n = config_.shifts.size();
  const double lambda = 1.0 / static_cast<double>(n);
  std::vector<RandomStream> points;
  std::vector<GumbelPointStream> streams;
  std::vector<std::int64_t> shift;
  std::vector<double> pending(n);
  std::vector<std::uint64_t> used(n, 0);
  points.reserve(n);
  streams.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    points.emplace_back(key(replication, j, SubstreamKey::kPointStreamSlot));
    streams.emplace_back(lambda);
    shift.push_back(lattice_index(config_.shifts[j], grid_.step(), "shift"));
    pending[j] = streams[j].next(points[j]);
  }

  // Streams are merged in decreasing order of X so the adaptive rule sees the
  // largest outstanding point.
  Accumulator acc(grid_);
  StopReason reason = StopReason::FixedK;
  std::uint64_t total = 0;
  for (;;) {
    std::size_t best = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j] < config_.k_max && (best == n || pending[j] > pending[best])) best = j;
    }
    if (best == n) break;
    const double x = pending[best];
    if (config_.adaptive && x + q_hi_ < acc.c()) {
      reason = StopReason::Adaptive;
      break;
    }
    RandomStream rng(key(replication, best, used[best]));
    acc.add(x, sample_drifted_path(*factor_, rng, config_.drift), shift[best]);
    ++used[best];
    ++total;
    if (used[best] < config_.k_max) pending[best] = streams[best].next(points[best]);
  }
  return acc.finish(total, reason, config_.margins);
}

FieldRealization Generator::method2(std::uint64_t replication) const {
  const double p = grid_.step();
  const double v = config_.translation_half_width;
  const std::int64_t reach = factor_->grid().half_count() - grid_.half_count();
  const auto marks = MarkSpace::interval(-v, v);
  RandomStream points(key(replication, 0, SubstreamKey::kPointStreamSlot));
  GumbelPointStream stream(1.0);
  Accumulator acc(grid_);
  StopReason reason = StopReason::FixedK;
  std::uint64_t k = 0;
  while (k < config_.k_max) {
    const auto point = next_marked_point(stream, marks, points);
    if (config_.adaptive && point.value + q_hi_ < acc.c()) {
      reason = StopReason::Adaptive;
      break;
    }
    const auto h = std::clamp<std::int64_t>(std::llround(point.mark / p), -reach, reach);
    RandomStream rng(key(replication, 0, k));
    acc.add(point.value, sample_drifted_path(*factor_, rng, config_.drift), h);
    ++k;
  }
  return acc.finish(k, reason, config_.margins);
}

FieldRealization Generator::method3(std::uint64_t replication, bool stop) const {
  const std::int64_t jmax = config_.j_max;
  const auto blocks = static_cast<std::size_t>(2 * jmax + 1);
  std::vector<RandomStream> points;
  std::vector<GumbelPointStream> streams;
  points.reserve(blocks);
  streams.reserve(blocks);
  for (std::int64_t j = -jmax; j <= jmax; ++j) {
    points.emplace_back(key(replication, SubstreamKey::block_id(j), SubstreamKey::kPointStreamSlot));
    streams.emplace_back(1.0);
  }
  std::vector<char> active(blocks, 1);

  Accumulator acc(grid_);
  std::uint64_t attempted = 0;
  bool any_active = true;
  std::uint64_t i = 0;
  // Round-robin over i, so C_k grows as fast as possible across blocks.
  for (; i < config_.k_max && any_active; ++i) {
    any_active = false;
    for (std::size_t slot = 0; slot < blocks; ++slot) {
      if (!active[slot]) continue;
      const double x = streams[slot].next(points[slot]);
      // Accepted paths satisfy xi <= 0, so nothing after X < C can raise Z.
      if (stop && x < acc.c()) {
        active[slot] = 0;
        continue;
      }
      any_active = true;
      const std::int64_t j = static_cast<std::int64_t>(slot) - jmax;
      RandomStream rng(key(replication, SubstreamKey::block_id(j), i));
      ++attempted;
      const auto path = sample_drifted_path_while(*factor_, rng, argmax_stays_at_origin);
      if (path) acc.add(x, *path, j);
    }
  }
  const bool stopped = std::none_of(active.begin(), active.end(), [](char a) { return a != 0; });
  return acc.finish(attempted, stopped ? StopReason::Adaptive : StopReason::FixedK, config_.margins);
}

FieldRealization Generator::method4(std::uint64_t replication, bool stop) const {
  const double p = grid_.step();
  const std::int64_t sites = static_cast<std::int64_t>(std::floor(config_.window / p + 1e-9));
  const double rate = *config_.lambda_p * p * static_cast<double>(2 * sites + 1);
  RandomStream points(key(replication, 0, SubstreamKey::kPointStreamSlot));
  GumbelPointStream stream(rate);
  Accumulator acc(grid_);
  StopReason reason = StopReason::FixedK;
  std::uint64_t k = 0;
  while (k < config_.k_max) {
    const double u = stream.next(points);
    const auto s = static_cast<std::int64_t>(points.index(static_cast<std::uint64_t>(2 * sites + 1))) - sites;
    if (stop && u < acc.c()) {
      reason = StopReason::Adaptive;
      break;
    }
    RandomStream rng(key(replication, 0, k));
    acc.add(u, shapes_->draw(rng).shape, s);
    ++k;
  }
  return acc.finish(k, reason, config_.margins);
}

FieldRealization simulate(const VariogramModel& model, const Grid& grid, const MethodConfig& config,
                          std::uint64_t seed, std::uint64_t replication) {
  return Generator(model, grid, config, seed).run(replication);
}

}  // namespace brsim
