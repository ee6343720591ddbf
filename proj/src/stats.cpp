#include "brsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/poisson.hpp>

#include "brsim/errors.hpp"

namespace brsim {

namespace {

void require_nonempty(std::size_t n, const char* what) {
  if (n == 0) throw Error(ErrorKind::EmptySample, std::string(what) + " is empty");
}

double to_gumbel(double value, Margins margins) { return margins == Margins::Frechet ? std::log(value) : value; }

}  // namespace

double gumbel_cdf(double x) { return std::exp(-std::exp(-x)); }

double gumbel_deviation(std::span<const double> sample) {
  require_nonempty(sample.size(), "sample");
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  double dev = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double g = gumbel_cdf(sorted[i]);
    const double above = static_cast<double>(i + 1) / n;
    const double below = static_cast<double>(i) / n;
    dev = std::max({dev, std::fabs(above - g), std::fabs(below - g)});
  }
  return dev;
}

DevSummary dev_summary(std::span<const double> at_a, std::span<const double> at_0,
                       std::span<const double> at_b) {
  DevSummary s;
  s.dev_a = gumbel_deviation(at_a);
  s.dev_0 = gumbel_deviation(at_0);
  s.dev_b = gumbel_deviation(at_b);
  s.DEV = (s.dev_a + s.dev_b) / 2.0;
  s.n_reps = at_0.size();
  return s;
}

DevSummary dev_summary(const std::vector<FieldRealization>& realizations) {
  require_nonempty(realizations.size(), "realization set");
  std::vector<double> a, z, b;
  for (const auto& r : realizations) {
    const std::int64_t n = r.grid.half_count();
    a.push_back(to_gumbel(r.at(-n), r.margins));
    z.push_back(to_gumbel(r.at(0), r.margins));
    b.push_back(to_gumbel(r.at(n), r.margins));
  }
  return dev_summary(a, z, b);
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  require_nonempty(a.size(), "first sample");
  require_nonempty(b.size(), "second sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const auto n = static_cast<double>(x.size());
  const auto m = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == t) ++i;
    while (j < y.size() && y[j] == t) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  return d;
}

double ks_critical(std::size_t n, std::size_t m, double coefficient) {
  const auto nn = static_cast<double>(n);
  const auto mm = static_cast<double>(m);
  return coefficient * std::sqrt((nn + mm) / (nn * mm));
}

double max_stability_check(std::span<const double> sample, std::size_t block) {
  if (block == 0 || sample.empty() || sample.size() % (block + 1) != 0) {
    throw Error(ErrorKind::BlockMismatch, "sample of size " + std::to_string(sample.size()) +
                                              " does not split into raw values and blocks of " +
                                              std::to_string(block));
  }
  const std::size_t blocks = sample.size() / (block + 1);
  const auto raw = sample.first(blocks);
  std::vector<double> maxima;
  maxima.reserve(blocks);
  const double shift = std::log(static_cast<double>(block));
  for (std::size_t i = 0; i < blocks; ++i) {
    const auto chunk = sample.subspan(blocks + i * block, block);
    maxima.push_back(*std::max_element(chunk.begin(), chunk.end()) - shift);
  }
  return ks_two_sample(raw, maxima);
}

double stationarity_check(const std::vector<FieldRealization>& realizations, double t1, double t2) {
  if (realizations.size() < 2) throw Error(ErrorKind::EmptySample, "need at least two realizations");
  const Grid& grid = realizations.front().grid;
  const auto i1 = grid.index_of(t1);
  const auto i2 = grid.index_of(t2);
  if (!i1) throw Error(ErrorKind::UnknownGridPoint, "t1=" + std::to_string(t1) + " is not a grid point");
  if (!i2) throw Error(ErrorKind::UnknownGridPoint, "t2=" + std::to_string(t2) + " is not a grid point");
  const std::size_t half = realizations.size() / 2;
  std::vector<double> first;
  std::vector<double> second;
  for (std::size_t r = 0; r < half; ++r) first.push_back(realizations[r].at(*i1));
  for (std::size_t r = half; r < realizations.size(); ++r) second.push_back(realizations[r].at(*i2));
  return ks_two_sample(first, second);
}

double poisson_gof_pvalue(std::span<const std::uint64_t> counts, double mean) {
  require_nonempty(counts.size(), "count sample");
  const std::uint64_t top = *std::max_element(counts.begin(), counts.end());
  std::vector<double> observed(top + 2, 0.0);
  for (const auto c : counts) observed[c] += 1.0;
  const auto n = static_cast<double>(counts.size());
  const boost::math::poisson_distribution<double> law(mean);

  // Cells 0..top plus an open tail cell; adjacent cells are pooled until the
  // expected count reaches 5.
  std::vector<double> obs_cells;
  std::vector<double> exp_cells;
  double o = 0.0;
  double e = 0.0;
  for (std::uint64_t c = 0; c <= top + 1; ++c) {
    o += observed[c];
    e += c <= top ? n * boost::math::pdf(law, static_cast<double>(c))
                  : n * boost::math::cdf(boost::math::complement(law, static_cast<double>(top)));
    if (e >= 5.0) {
      obs_cells.push_back(o);
      exp_cells.push_back(e);
      o = 0.0;
      e = 0.0;
    }
  }
  if (e > 0.0 || o > 0.0) {
    if (exp_cells.empty()) {
      obs_cells.push_back(o);
      exp_cells.push_back(e);
    } else {
      obs_cells.back() += o;
      exp_cells.back() += e;
    }
  }
  if (exp_cells.size() < 2) return 1.0;
  double chi2 = 0.0;
  for (std::size_t i = 0; i < exp_cells.size(); ++i) {
    chi2 += (obs_cells[i] - exp_cells[i]) * (obs_cells[i] - exp_cells[i]) / exp_cells[i];
  }
  const boost::math::chi_squared_distribution<double> ref(static_cast<double>(exp_cells.size() - 1));
  return boost::math::cdf(boost::math::complement(ref, chi2));
}

}  // namespace brsim
