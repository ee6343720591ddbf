#include "brsim/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "brsim/errors.hpp"

namespace brsim {

namespace {

const double kSqrt2Pi = std::sqrt(2.0 * M_PI);

[[noreturn]] void domain(const std::string& what) { throw Error(ErrorKind::DomainError, what); }

bool is_multiple(double a, double h) {
  const double r = a / h;
  return std::fabs(r - std::round(r)) <= 1e-9 * std::max(1.0, std::fabs(r));
}

// 1 - exp(-y) for y >= 0, accurate for tiny y.
double one_minus_exp_neg(double y) { return -std::expm1(-y); }

// log(1 - exp(-y)), y > 0.
double log_one_minus_exp_neg(double y) {
  return y > 0.6931 ? std::log1p(-std::exp(-y)) : std::log(-std::expm1(-y));
}

// 4 e^{-c} (t/(c-x)) e^{t/2} (1 - Phi((c - x - t)/sqrt t)); C read as c(k).
double conditional_term(double t, double c, double x) {
  return 4.0 * std::exp(-c) * (t / (c - x)) * std::exp(t / 2.0) * normal_sf((c - x - t) / std::sqrt(t));
}

// log of  mult^k exp(-(k-1) y) / (k-1)! * (1 - exp(-e^{-z}))
double log_high_term(double log_mult_pow_k, std::uint64_t k, double y, double z) {
  const double kk = static_cast<double>(k);
  return log_mult_pow_k - (kk - 1.0) * y - std::lgamma(kk) + log_one_minus_exp_neg(std::exp(-z));
}

void require_schedule(double c, double x) {
  if (!(x < c)) domain("x(k) < c(k) violated");
  if (!(c < 0.0)) domain("c(k) < 0 violated");
}

// Low-event term shared by methods 1 and 2, with t = b - h_1 or t_o.
double shifted_low_term(double t, double c) {
  const double bracket = normal_cdf(-(c + t) / (2.0 * std::sqrt(t))) +
                         std::exp(-c / 2.0) * normal_sf(-(c - t) / (2.0 * std::sqrt(t)));
  return 1.0 - one_minus_exp_neg(std::exp(-c / 2.0)) * bracket * bracket;
}

// Factor (1 - 4/(1-e^{-p/2}) (1 - Phi(-c/sqrt(8b) - sqrt(b/2)) - e^{-c/2}(1 - Phi(-c/sqrt(8b) + sqrt(b/2))))^2)
double lattice_low_factor(double b, double p, double c) {
  const double u = -c / std::sqrt(8.0 * b);
  const double s = std::sqrt(b / 2.0);
  const double inner = normal_sf(u - s) - std::exp(-c / 2.0) * normal_sf(u + s);
  const double scaled = 4.0 / one_minus_exp_neg(p / 2.0) * inner;
  return 1.0 - scaled * scaled;
}

void finish(ErrorBudget& e, double log_high) {
  e.log_high_event = log_high;
  e.high_event = std::exp(log_high);
  e.total = e.conditional + e.low_event + e.high_event;
  e.total_clamped = std::min(e.total, 1.0);
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / M_SQRT2); }

double normal_sf(double x) { return 0.5 * std::erfc(x / M_SQRT2); }

double excursion_bound(double lambda, double t_u, double t_o, double C, double x) {
  if (!(C > x)) domain("excursion bound needs C > x");
  if (!(t_u <= 0.0 && t_o >= 0.0)) domain("excursion bound needs t_u <= 0 <= t_o");
  if (!(lambda > 0.0)) domain("excursion bound needs lambda > 0");
  double sum = 0.0;
  for (const double t : {std::fabs(t_u), std::fabs(t_o)}) {
    if (t == 0.0) continue;
    sum += lambda * std::exp(-C) * (2.0 * t / (C - x)) * std::exp(t / 2.0) *
           normal_sf((C - x - t) / std::sqrt(t));
  }
  return sum;
}

double block_bound(double a1, double h, double L, double C, bool sharp) {
  if (!(h > 0.0)) domain("block bound needs h > 0");
  if (!(L > 0.0)) domain("block bound needs L > 0");
  if (!is_multiple(a1, h)) domain("block bound needs a1 to be a multiple of h");
  if (!is_multiple(L, h)) domain("block bound needs L to be a multiple of h");
  const double a = a1 - h;
  const double ra = std::sqrt(a);
  const double lead = 25.0 * L / 9.0 * std::sqrt(2.0 * L / M_PI);
  if (sharp) {
    if (!(a1 > 16.0 + h)) domain("sharp block bound needs a1 > 16 + h");
    return 2.0 * std::exp(-C) / h *
           (std::exp(-ra) + lead * std::exp(-std::pow(ra - std::log(ra), 2) / (2.0 * L)) +
            8.0 / kSqrt2Pi * (1.0 + 2.0 / (ra - 4.0)) * std::exp(-std::pow(ra - 4.0, 2) / 8.0));
  }
  if (!(a1 > 4.0 + h)) domain("block bound needs a1 > 4 + h");
  const double r25 = std::sqrt(std::max(a, 25.0));
  const double e = 0.3 * ra + 0.2 * r25 - std::log(r25 / 2.0);
  return 8.0 * std::exp(-C) / h *
         (std::exp(-ra / 2.0) + lead * std::exp(-e * e / (2.0 * L)) +
          1.0 / kSqrt2Pi * (1.0 + 1.0 / (ra - 2.0)) * std::exp(-std::pow(ra - 2.0, 2) / 8.0));
}

double schedule_c(std::uint64_t k) {
  return -std::log(std::log(std::log(static_cast<double>(k)) / 2.0));
}

double schedule_x(std::uint64_t k) { return -std::log(static_cast<double>(k)) / 2.0; }

ErrorBudget method_error_bound(int method, const BoundParams& in) {
  if (in.k < 1) domain("k must be at least 1");
  if (!(in.b > 0.0)) domain("b must be positive");
  const double b = in.b;
  const std::uint64_t k = in.k;
  const double kk = static_cast<double>(k);

  ErrorBudget e;
  e.params = {{"method", method}, {"b", b}, {"k", kk}};

  switch (method) {
    case 0: {
      const double c = in.c.value_or(schedule_c(k));
      const double x = in.x.value_or(schedule_x(k));
      require_schedule(c, x);
      e.params.insert(e.params.end(), {{"c", c}, {"x", x}});
      e.conditional = conditional_term(b, c, x);
      const double phi = 2.0 * normal_cdf(-c / (2.0 * std::sqrt(b))) - 1.0;
      e.low_event = 1.0 - one_minus_exp_neg(std::exp(-c / 2.0)) * phi * phi;
      finish(e, log_high_term(0.0, k, x, x));
      return e;
    }
    case 1: {
      const double c = in.c.value_or(schedule_c(k));
      const double x = in.x.value_or(schedule_x(k));
      if (in.shifts.empty()) domain("method 1 needs at least one shift");
      std::vector<double> h = in.shifts;
      std::sort(h.begin(), h.end());
      if (std::adjacent_find(h.begin(), h.end()) != h.end()) {
        throw Error(ErrorKind::AsymmetricShifts, "shifts must be distinct");
      }
      for (std::size_t i = 0; i < h.size(); ++i) {
        if (std::fabs(h[i] + h[h.size() - 1 - i]) > 1e-12 * std::max(1.0, std::fabs(h[i]))) {
          throw Error(ErrorKind::AsymmetricShifts, "shift set is not symmetric about 0");
        }
      }
      require_schedule(c, x);
      const double n = static_cast<double>(h.size());
      const double t = b - h.front();
      e.params.insert(e.params.end(), {{"c", c}, {"x", x}, {"n", n}, {"h1", h.front()}});
      e.conditional = conditional_term(t, c, x);
      e.low_event = shifted_low_term(t, c);
      finish(e, log_high_term((kk + 1.0) * std::log(n), k, x, n * x));
      return e;
    }
    case 2: {
      const double c = in.c.value_or(schedule_c(k));
      const double x = in.x.value_or(schedule_x(k));
      if (!(in.v > 0.0)) domain("method 2 needs v > 0");
      require_schedule(c, x);
      const double t_o = b + in.v;  // b - min_{h in I} h
      e.params.insert(e.params.end(), {{"c", c}, {"x", x}, {"v", in.v}, {"t_o", t_o}});
      e.conditional = conditional_term(t_o, c, x);
      e.low_event = shifted_low_term(t_o, c);
      finish(e, log_high_term(0.0, k, x, x));
      return e;
    }
    case 3: {
      const double c = in.c.value_or(-std::log(kk) / 2.0);
      const double p = in.p;
      if (!(c < 0.0)) domain("c(k) < 0 violated");
      if (!(p > 0.0)) domain("p must be positive");
      const double reach = p * static_cast<double>(in.j_max);
      if (in.sharp ? !(reach > b + 16.0) : !(reach > b + 4.0)) {
        domain(in.sharp ? "p*j_max > b + 16 violated" : "p*j_max > b + 4 violated");
      }
      e.params.insert(e.params.end(), {{"c", c}, {"p", p}, {"j_max", static_cast<double>(in.j_max)}});
      const double a = reach - b;  // "p j_max - o" read as p j_max - b
      const double ra = std::sqrt(a);
      const double lead = 100.0 / 9.0 * std::sqrt(b * b * b / M_PI);
      if (in.sharp) {
        e.conditional = 4.0 * std::exp(-c) / p *
                        (std::exp(-ra) + lead * std::exp(-std::pow(ra - std::log(ra), 2) / (4.0 * b)) +
                         8.0 / kSqrt2Pi * (1.0 + 2.0 / (ra - 4.0)) * std::exp(-std::pow(ra - 4.0, 2) / 8.0));
      } else {
        const double r25 = std::sqrt(std::max(a, 25.0));
        const double s = 0.3 * ra + 0.2 * r25 - std::log(r25 / 2.0);
        e.conditional = 16.0 * std::exp(-c) / p *
                        (std::exp(-ra / 2.0) + lead * std::exp(-s * s / (4.0 * b)) +
                         1.0 / kSqrt2Pi * (1.0 + 1.0 / (ra - 2.0)) * std::exp(-std::pow(ra - 2.0, 2) / 8.0));
      }
      const double q = one_minus_exp_neg(p / 2.0);
      const double first = one_minus_exp_neg((2.0 * b / p + 1.0) / 4.0 * std::exp(-c / 2.0) * q * q);
      e.low_event = 1.0 - first * lattice_low_factor(b, p, c);
      finish(e, log_high_term(std::log(2.0 * static_cast<double>(in.j_max) + 1.0), k, c, c));
      return e;
    }
    case 4: {
      const double c = in.c.value_or(-std::log(kk) / 4.0);
      const double p = in.p;
      const double v = in.v;
      const double lambda = in.lambda_p;
      if (!(c < 0.0)) domain("c(k) < 0 violated");
      if (!(p > 0.0)) domain("p must be positive");
      if (!(lambda > 0.0)) domain("lambda_p must be positive");
      if (in.sharp ? !(v > b + 16.0) : !(v > b + 4.0)) {
        domain(in.sharp ? "v > b + 16 violated" : "v > b + 4 violated");
      }
      e.params.insert(e.params.end(), {{"c", c}, {"p", p}, {"v", v}, {"lambda_p", lambda}});
      const double d = v - b;  // every "o" read as v
      const double rd = std::sqrt(d);
      const double q = one_minus_exp_neg(p / 2.0);
      const double tail = 100.0 * std::sqrt(b * b * b) / (9.0 * std::sqrt(M_PI));
      if (in.sharp) {
        e.conditional = 16.0 * std::exp(-c) / (q * q) * lambda *
                        (std::exp(-rd) +
                         8.0 / kSqrt2Pi * (1.0 + 1.0 / (rd - 4.0)) * std::exp(-std::pow(rd - 4.0, 2) / 8.0) +
                         tail * std::exp(-std::pow(rd - std::log(rd), 2) / (4.0 * b)));
      } else {
        const double r25 = std::sqrt(std::max(d, 25.0));
        const double s = 0.3 * rd + 0.2 * r25 - std::log(r25 / 2.0);
        e.conditional = 64.0 * std::exp(-c) / (q * q) * lambda *
                        (std::exp(-rd / 2.0) +
                         1.0 / kSqrt2Pi * (1.0 + 1.0 / (rd - 2.0)) * std::exp(-std::pow(rd - 2.0, 2) / 8.0) +
                         tail * std::exp(-s * s / (4.0 * b)));
      }
      const double first = one_minus_exp_neg(lambda * (2.0 * b + p) * std::exp(-c / 2.0));
      const double log_middle = kk * std::log(2.0 * d * lambda) - (kk - 1.0) * c / 2.0 - std::lgamma(kk) +
                                log_one_minus_exp_neg(std::exp(-d * lambda * c));
      const double middle = 1.0 - std::exp(log_middle);
      e.low_event = 1.0 - first * middle * lattice_low_factor(b, p, c);
      const double rate = (2.0 * v + p) * lambda;
      finish(e, log_high_term(kk * std::log(rate), k, c, rate * c));
      return e;
    }
    default:
      throw Error(ErrorKind::ConfigError, "method must be 0..4, got " + std::to_string(method));
  }
}

}  // namespace brsim
