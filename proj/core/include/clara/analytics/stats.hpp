#pragma once

#include <cstddef>
#include <span>

namespace clara::analytics {

struct DescriptiveStats {
  double mean = 0.0;
  double sd = 0.0;  // sample SD, n-1 denominator; 0 when n == 1
  std::size_t n = 0;
};

/// Throws Error(InvalidArgument) for an empty sample.
DescriptiveStats describe(std::span<const double> values);

struct TTestResult {
  double t = 0.0;
  int df = 0;
  double p = 1.0;  // two-sided
  double mu0 = 0.0;
};

/// t = (M - mu0) * sqrt(n) / SD against Student-t with n-1 degrees of freedom.
/// Throws Error(DegenerateSample) when n < 2 or SD == 0.
TTestResult one_sample_t(const DescriptiveStats& stats, double mu0);

/// I_x(a, b) by continued fraction. `xc` is 1 - x, passed separately to keep
/// precision when x is close to 1.
double regularized_incomplete_beta(double a, double b, double x, double xc);
double regularized_incomplete_beta(double a, double b, double x);

/// P(|T| >= |t|) for Student-t with `df` degrees of freedom (df > 0).
double student_t_two_sided_p(double t, double df);
double student_t_cdf(double t, double df);

}  // namespace clara::analytics
