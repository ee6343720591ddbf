#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace brsim {

/// Standard normal CDF via erfc (absolute error ~1e-16).
double normal_cdf(double x);
/// 1 - Phi(x) without cancellation.
double normal_sf(double x);

/// P(exists i: X_i < x, sup_{[t_u, t_o]} X_i + W_i > C) for a standard
/// Brownian motion W and points of intensity lambda e^{-x} dx. Every C, x in
/// the formula is the caller's C, x; the |t*| inside Phi is read per side.
/// Throws DomainError unless C > x, t_u <= 0 <= t_o, lambda > 0.
double excursion_bound(double lambda, double t_u, double t_o, double C, double x);

/// Block bound for paths started at lattice distance >= a1 over windows of
/// length L (loose: a1 > 4 + h; sharp: a1 > 16 + h). Throws DomainError.
double block_bound(double a1, double h, double L, double C, bool sharp);

struct BoundParams {
  double b = 1.0;
  std::uint64_t k = 10000;
  /// c(k), x(k); the schedule from k is used when empty.
  std::optional<double> c;
  std::optional<double> x;
  double p = 0.1;
  std::vector<double> shifts;  // method 1, sorted symmetric set
  double v = 0.0;              // method 2: I = [-v, v]; method 4: site window
  std::int64_t j_max = 0;      // method 3
  double lambda_p = 0.0;       // method 4
  bool sharp = false;          // methods 3/4 conditional component only
};

struct ErrorBudget {
  double conditional = 0.0;
  double low_event = 0.0;
  double high_event = 0.0;
  double total = 0.0;          // conditional + low_event + high_event
  double total_clamped = 0.0;  // min(total, 1)
  double log_high_event = 0.0; // high_event underflows long before its log does
  std::vector<std::pair<std::string, double>> params;
};

/// c(k) = -log log(log(k)/2), x(k) = -log(k)/2 (methods 0-2).
double schedule_c(std::uint64_t k);
double schedule_x(std::uint64_t k);

/// Throws DomainError naming the violated precondition, AsymmetricShifts for
/// method 1 with a non-symmetric shift set.
ErrorBudget method_error_bound(int method, const BoundParams& params);

}  // namespace brsim
