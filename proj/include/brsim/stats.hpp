#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "brsim/methods.hpp"

namespace brsim {

/// exp(-e^{-x}).
double gumbel_cdf(double x);

/// Exact one-sample KS distance between the empirical CDF of `sample` and
/// gumbel_cdf. Throws EmptySample.
double gumbel_deviation(std::span<const double> sample);

struct DevSummary {
  double dev_a = 0.0;
  double dev_0 = 0.0;
  double dev_b = 0.0;
  double DEV = 0.0;  // (dev_a + dev_b) / 2
  std::uint64_t n_reps = 0;
};

/// Samples at -b, 0 and +b, one value per replication. Throws EmptySample.
DevSummary dev_summary(std::span<const double> at_a, std::span<const double> at_0,
                       std::span<const double> at_b);
/// Gumbel-scale values at -b, 0, +b of each realization.
DevSummary dev_summary(const std::vector<FieldRealization>& realizations);

/// Two-sample KS statistic sup |F_n - G_m|. Throws EmptySample.
double ks_two_sample(std::span<const double> a, std::span<const double> b);
/// c(alpha) sqrt((n + m)/(n m)); 1.628 is the 1% coefficient.
double ks_critical(std::size_t n, std::size_t m, double coefficient = 1.628);

/// Splits `sample` (size (n + 1) B) into B raw values followed by B blocks of
/// n values, and returns the KS statistic between the raw values and
/// max(block) - log n. Throws BlockMismatch when the size does not split.
double max_stability_check(std::span<const double> sample, std::size_t block);

/// Realizations [0, R/2) are read at t1 and [R/2, R) at t2, so the two
/// samples are independent. Throws UnknownGridPoint or EmptySample.
double stationarity_check(const std::vector<FieldRealization>& realizations, double t1, double t2);

/// Upper-tail p-value of the chi-square goodness-of-fit statistic comparing
/// integer counts with Poisson(mean). Cells with expected count < 5 are pooled.
double poisson_gof_pvalue(std::span<const std::uint64_t> counts, double mean);

}  // namespace brsim
