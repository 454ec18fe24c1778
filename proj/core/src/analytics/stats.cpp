#include "clara/analytics/stats.hpp"

#include <cmath>
#include <limits>

#include "clara/error.hpp"

namespace clara::analytics {

DescriptiveStats describe(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "cannot describe an empty sample");
  DescriptiveStats s;
  s.n = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(s.n - 1));
  }
  return s;
}

TTestResult one_sample_t(const DescriptiveStats& stats, double mu0) {
  if (stats.n < 2) throw Error(ErrorCode::DegenerateSample, "one-sample t-test needs n >= 2");
  if (!(stats.sd > 0.0)) throw Error(ErrorCode::DegenerateSample, "one-sample t-test needs SD > 0");
  TTestResult r;
  r.mu0 = mu0;
  r.df = static_cast<int>(stats.n - 1);
  r.t = (stats.mean - mu0) * std::sqrt(static_cast<double>(stats.n)) / stats.sd;
  r.p = student_t_two_sided_p(r.t, r.df);
  return r;
}

namespace {

/// Continued fraction for I_x(a,b), modified Lentz.
double beta_fraction(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 100000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) return h;
  }
  return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x, double xc) {
  if (!(a > 0.0) || !(b > 0.0)) throw Error(ErrorCode::InvalidArgument, "incomplete beta needs a, b > 0");
  if (x < 0.0 || x > 1.0) throw Error(ErrorCode::OutOfRange, "incomplete beta needs 0 <= x <= 1");
  if (x == 0.0) return 0.0;
  if (xc == 0.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log(xc);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_fraction(a, b, x) / a;
  return 1.0 - front * beta_fraction(b, a, xc) / b;
}

double regularized_incomplete_beta(double a, double b, double x) {
  return regularized_incomplete_beta(a, b, x, 1.0 - x);
}

double student_t_two_sided_p(double t, double df) {
  if (!(df > 0.0)) throw Error(ErrorCode::InvalidArgument, "degrees of freedom must be positive");
  if (std::isnan(t)) throw Error(ErrorCode::InvalidArgument, "t is NaN");
  if (std::isinf(t)) return 0.0;
  const double t2 = t * t;
  const double x = df / (df + t2);
  const double xc = t2 / (df + t2);
  double p = regularized_incomplete_beta(df / 2.0, 0.5, x, xc);
  if (p < 0.0) p = 0.0;
  if (p > 1.0) p = 1.0;
  return p;
}

double student_t_cdf(double t, double df) {
  const double half = student_t_two_sided_p(t, df) / 2.0;
  return t >= 0.0 ? 1.0 - half : half;
}

}  // namespace clara::analytics
