#include <gtest/gtest.h>

#include <cmath>

#include <boost/math/distributions/normal.hpp>

#include "brsim/bounds.hpp"
#include "brsim/errors.hpp"

using namespace brsim;

namespace {

// Independent Phi for the dual-implementation checks.
double Phi(double x) { return boost::math::cdf(boost::math::normal_distribution<double>(), x); }
double Q(double x) { return boost::math::cdf(boost::math::complement(boost::math::normal_distribution<double>(), x)); }

void expect_rel(double got, double want) {
  EXPECT_NEAR(got, want, 1e-12 * std::fabs(want)) << got << " vs " << want;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::IoError;  // sentinel: nothing thrown
}

}  // namespace

TEST(NormalCdf, Accuracy) {
  EXPECT_EQ(normal_cdf(0.0), 0.5);
  for (double x = -8.0; x <= 8.0; x += 0.37) {
    EXPECT_NEAR(normal_cdf(-x), 1.0 - normal_cdf(x), 1e-12);
    EXPECT_NEAR(normal_cdf(x), Phi(x), 1e-12);
    EXPECT_NEAR(normal_sf(x), 1.0 - normal_cdf(x), 1e-12);
  }
}

TEST(ExcursionBound, SymmetricIsTwiceOneSided) {
  const double one = excursion_bound(1.0, 0.0, 1.5, 2.0, -0.5);
  EXPECT_DOUBLE_EQ(excursion_bound(1.0, -1.5, 1.5, 2.0, -0.5), 2.0 * one);
}

TEST(ExcursionBound, DecreasingInC) {
  double last = INFINITY;
  for (const double c : {1.0, 2.0, 3.0, 4.0}) {
    const double v = excursion_bound(1.0, -1.0, 1.0, c, 0.0);
    EXPECT_LT(v, last);
    last = v;
  }
}

TEST(ExcursionBound, ZeroWidthSidesVanish) {
  EXPECT_EQ(excursion_bound(1.0, 0.0, 0.0, 1.0, 0.0), 0.0);
}

TEST(ExcursionBound, DualImplementation) {
  const double lambda = 0.7, tu = -0.8, to = 1.9, C = 1.3, x = -2.1;
  const double want = lambda * std::exp(-C) * 2 * 0.8 / (C - x) * std::exp(0.4) * (1 - Phi((C - x - 0.8) / std::sqrt(0.8))) +
                      lambda * std::exp(-C) * 2 * 1.9 / (C - x) * std::exp(0.95) * (1 - Phi((C - x - 1.9) / std::sqrt(1.9)));
  expect_rel(excursion_bound(lambda, tu, to, C, x), want);
}

TEST(ExcursionBound, DomainError) {
  EXPECT_EQ(kind_of([] { excursion_bound(1.0, -1.0, 1.0, 0.0, 0.0); }), ErrorKind::DomainError);
  EXPECT_EQ(kind_of([] { excursion_bound(1.0, 0.5, 1.0, 1.0, 0.0); }), ErrorKind::DomainError);
}

TEST(BlockBound, PositiveAndDecreasing) {
  double last = INFINITY;
  for (const double a1 : {8.0, 16.0, 32.0, 64.0}) {
    const double v = block_bound(a1, 1.0, 4.0, 0.0, false);
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, last);
    last = v;
  }
  EXPECT_GT(block_bound(32.0, 1.0, 4.0, 0.0, true), 0.0);
  EXPECT_LE(block_bound(64.0, 1.0, 4.0, 0.0, true), block_bound(64.0, 1.0, 4.0, 0.0, false));
}

TEST(BlockBound, DualImplementation) {
  const double a1 = 12.0, h = 0.5, L = 3.0, C = -0.4;
  const double a = a1 - h, ra = std::sqrt(a);
  const double e = 0.3 * ra + 0.2 * 5.0 - std::log(5.0 / 2.0);  // a < 25
  const double loose = 8 * std::exp(-C) / h *
                       (std::exp(-ra / 2) + 25 * L / 9 * std::sqrt(2 * L / M_PI) * std::exp(-e * e / (2 * L)) +
                        1 / std::sqrt(2 * M_PI) * (1 + 1 / (ra - 2)) * std::exp(-(ra - 2) * (ra - 2) / 8));
  expect_rel(block_bound(a1, h, L, C, false), loose);
  const double a1s = 20.0, as = a1s - h, rs = std::sqrt(as);
  const double sharp = 2 * std::exp(-C) / h *
                       (std::exp(-rs) +
                        25 * L / 9 * std::sqrt(2 * L / M_PI) * std::exp(-std::pow(rs - std::log(rs), 2) / (2 * L)) +
                        8 / std::sqrt(2 * M_PI) * (1 + 2 / (rs - 4)) * std::exp(-(rs - 4) * (rs - 4) / 8));
  expect_rel(block_bound(a1s, h, L, C, true), sharp);
}

TEST(BlockBound, PreconditionsNamed) {
  try {
    block_bound(5.0, 1.0, 4.0, 0.0, false);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DomainError);
    EXPECT_NE(std::string(e.what()).find("4 + h"), std::string::npos);
  }
  try {
    block_bound(10.0, 1.0, 4.0, 0.0, true);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("16 + h"), std::string::npos);
  }
  EXPECT_THROW(block_bound(10.5, 1.0, 4.0, 0.0, false), Error);
  EXPECT_THROW(block_bound(10.0, 1.0, 4.5, 0.0, false), Error);
  EXPECT_THROW(block_bound(10.0, 1.0, 0.0, 0.0, false), Error);
}

TEST(MethodBound, Method0ScheduleAtTenThousand) {
  BoundParams p;
  p.b = 1.0;
  p.k = 10000;
  const auto e = method_error_bound(0, p);
  const double lk = std::log(10000.0);
  const double c = -std::log(std::log(lk / 2));
  const double x = -lk / 2;
  const double cond = 4 * std::exp(-c) * 1.0 / (c - x) * std::exp(0.5) * (1 - Phi((c - x - 1) / 1.0));
  const double low = 1 - (1 - std::exp(-std::exp(-c / 2))) * std::pow(2 * Phi(-c / 2) - 1, 2);
  const double log_high = -9999 * x - std::lgamma(10000.0) + std::log(1 - std::exp(-std::exp(-x)));
  expect_rel(e.conditional, cond);
  expect_rel(e.low_event, low);
  expect_rel(e.log_high_event, log_high);
  EXPECT_GT(e.conditional, 0.0);
  EXPECT_GT(e.low_event, 0.0);
  // exp(-36000) underflows; the log carries the value.
  EXPECT_GE(e.high_event, 0.0);
  EXPECT_TRUE(std::isfinite(e.log_high_event));
  EXPECT_LT(e.log_high_event, 0.0);
  EXPECT_EQ(e.total, e.conditional + e.low_event + e.high_event);
}

TEST(MethodBound, Method0HighEventSmallK) {
  BoundParams p;
  p.k = 3;
  p.c = -0.5;
  p.x = -1.0;
  const auto e = method_error_bound(0, p);
  const double want = std::exp(2.0) / 2.0 * (1 - std::exp(-std::exp(1.0)));
  expect_rel(e.high_event, want);
}

TEST(MethodBound, Method0TotalDecreasesAlongSchedule) {
  double last = INFINITY;
  for (const std::uint64_t k : {1000ull, 1000000ull, 1000000000ull}) {
    BoundParams p;
    p.k = k;
    const auto e = method_error_bound(0, p);
    EXPECT_LT(e.total, last);
    last = e.total;
  }
}

TEST(MethodBound, Method1DualAndSymmetry) {
  BoundParams p;
  p.b = 2.0;
  p.k = 50;
  p.c = -0.7;
  p.x = -2.5;
  p.shifts = {-1.0, 0.0, 1.0};
  const auto e = method_error_bound(1, p);
  const double t = 3.0, c = -0.7, x = -2.5, n = 3.0;
  expect_rel(e.conditional, 4 * std::exp(-c) * t / (c - x) * std::exp(t / 2) * (1 - Phi((c - x - t) / std::sqrt(t))));
  const double br = Phi(-(c + t) / (2 * std::sqrt(t))) + std::exp(-c / 2) * (1 - Phi(-(c - t) / (2 * std::sqrt(t))));
  expect_rel(e.low_event, 1 - (1 - std::exp(-std::exp(-c / 2))) * br * br);
  expect_rel(e.log_high_event,
             51 * std::log(n) - 49 * x - std::lgamma(50.0) + std::log(1 - std::exp(-std::exp(-n * x))));
  p.shifts = {-1.0, 0.0, 2.0};
  EXPECT_EQ(kind_of([&] { method_error_bound(1, p); }), ErrorKind::AsymmetricShifts);
}

TEST(MethodBound, Method2Dual) {
  BoundParams p;
  p.b = 1.0;
  p.k = 20;
  p.c = -0.4;
  p.x = -2.0;
  p.v = 2.0;
  const auto e = method_error_bound(2, p);
  const double t = 3.0, c = -0.4, x = -2.0;
  expect_rel(e.conditional, 4 * std::exp(-c) * t / (c - x) * std::exp(t / 2) * (1 - Phi((c - x - t) / std::sqrt(t))));
  const double br = Phi(-(c + t) / (2 * std::sqrt(t))) + std::exp(-c / 2) * (1 - Phi(-(c - t) / (2 * std::sqrt(t))));
  expect_rel(e.low_event, 1 - (1 - std::exp(-std::exp(-c / 2))) * br * br);
  expect_rel(e.high_event, std::exp(-19 * x) / std::tgamma(20.0) * (1 - std::exp(-std::exp(-x))));
}

TEST(MethodBound, Method3DualAndBlockIdentity) {
  BoundParams p;
  p.b = 2.0;
  p.k = 10;
  p.c = -1.0;
  p.p = 0.1;
  p.j_max = 120;
  const double b = 2.0, c = -1.0, pp = 0.1, a = 10.0, ra = std::sqrt(a);
  const auto e = method_error_bound(3, p);
  const double r25 = 5.0;
  const double s = 0.3 * ra + 0.2 * r25 - std::log(r25 / 2);
  const double cond = 16 * std::exp(-c) / pp *
                      (std::exp(-ra / 2) + 100.0 / 9 * std::sqrt(b * b * b / M_PI) * std::exp(-s * s / (4 * b)) +
                       1 / std::sqrt(2 * M_PI) * (1 + 1 / (ra - 2)) * std::exp(-(ra - 2) * (ra - 2) / 8));
  expect_rel(e.conditional, cond);
  expect_rel(e.conditional, 2 * block_bound(pp * 120 - b + pp, pp, 2 * b, c, false));
  const double q = 1 - std::exp(-pp / 2);
  const double u = -c / std::sqrt(8 * b), w = std::sqrt(b / 2);
  const double inner = (1 - Phi(u - w)) - std::exp(-c / 2) * (1 - Phi(u + w));
  const double low = 1 - (1 - std::exp(-(2 * b / pp + 1) / 4 * std::exp(-c / 2) * q * q)) *
                             (1 - std::pow(4 / q * inner, 2));
  expect_rel(e.low_event, low);
  expect_rel(e.high_event, 241 * std::exp(-9 * c) / std::tgamma(10.0) * (1 - std::exp(-std::exp(-c))));

  p.j_max = 200;
  p.sharp = true;
  const auto sharp = method_error_bound(3, p);
  expect_rel(sharp.conditional, 2 * block_bound(pp * 200 - b + pp, pp, 2 * b, c, true));
}

TEST(MethodBound, Method3PreconditionNamed) {
  BoundParams p;
  p.b = 2.0;
  p.c = -1.0;
  p.p = 0.1;
  p.j_max = 50;
  try {
    method_error_bound(3, p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DomainError);
    EXPECT_NE(std::string(e.what()).find("p*j_max > b + 4"), std::string::npos);
  }
}

TEST(MethodBound, Method4Dual) {
  BoundParams p;
  p.b = 2.0;
  p.k = 8;
  p.c = -0.6;
  p.p = 0.1;
  p.v = 12.0;
  p.lambda_p = 0.42;
  const double b = 2.0, c = -0.6, pp = 0.1, v = 12.0, l = 0.42, d = 10.0, rd = std::sqrt(d);
  const double q = 1 - std::exp(-pp / 2);
  const auto e = method_error_bound(4, p);
  const double s = 0.3 * rd + 0.2 * 5.0 - std::log(2.5);
  const double cond = 64 * std::exp(-c) / (q * q) * l *
                      (std::exp(-rd / 2) + 1 / std::sqrt(2 * M_PI) * (1 + 1 / (rd - 2)) * std::exp(-(rd - 2) * (rd - 2) / 8) +
                       100 * std::sqrt(b * b * b) / (9 * std::sqrt(M_PI)) * std::exp(-s * s / (4 * b)));
  expect_rel(e.conditional, cond);
  const double u = -c / std::sqrt(8 * b), w = std::sqrt(b / 2);
  const double inner = (1 - Phi(u - w)) - std::exp(-c / 2) * (1 - Phi(u + w));
  const double middle = 1 - std::pow(2 * d * l, 8) * std::exp(-7 * c / 2) / std::tgamma(8.0) *
                                (1 - std::exp(-std::exp(-d * l * c)));
  const double low = 1 - (1 - std::exp(-l * (2 * b + pp) * std::exp(-c / 2))) * middle * (1 - std::pow(4 / q * inner, 2));
  expect_rel(e.low_event, low);
  const double rate = (2 * v + pp) * l;
  expect_rel(e.high_event, std::pow(rate, 8) * std::exp(-7 * c) / std::tgamma(8.0) * (1 - std::exp(-std::exp(-rate * c))));

  p.v = 20.0;
  p.sharp = true;
  const double d2 = 18.0, r2 = std::sqrt(d2);
  const double sharp = 16 * std::exp(-c) / (q * q) * l *
                       (std::exp(-r2) + 8 / std::sqrt(2 * M_PI) * (1 + 1 / (r2 - 4)) * std::exp(-(r2 - 4) * (r2 - 4) / 8) +
                        100 * std::sqrt(b * b * b) / (9 * std::sqrt(M_PI)) * std::exp(-std::pow(r2 - std::log(r2), 2) / (4 * b)));
  expect_rel(method_error_bound(4, p).conditional, sharp);
}

TEST(MethodBound, SchedulePreconditions) {
  BoundParams p;
  p.c = 0.5;
  p.x = -1.0;
  EXPECT_EQ(kind_of([&] { method_error_bound(0, p); }), ErrorKind::DomainError);
  p.c = -1.0;
  p.x = -0.5;
  EXPECT_EQ(kind_of([&] { method_error_bound(0, p); }), ErrorKind::DomainError);
  BoundParams q;
  q.v = 5.0;
  q.lambda_p = 0.4;
  q.c = -1.0;
  q.b = 2.0;
  EXPECT_EQ(kind_of([&] { method_error_bound(4, q); }), ErrorKind::DomainError);
}
