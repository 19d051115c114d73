#pragma once

#include <optional>
#include <span>
#include <string>

namespace statusarena {

/// Ordinary least squares of y on x with an intercept.
struct OlsFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double t_statistic = 0.0;
  double p_value = 1.0;  // two-tailed, n - 2 degrees of freedom
  double residual_ss = 0.0;
  int n = 0;
};

/// nullopt when fewer than three points or x has no spread.
std::optional<OlsFit> ols(std::span<const double> x, std::span<const double> y);

/// Two-tailed p-value of a Student t statistic.
double student_t_two_tailed_p(double t, double dof);

struct GroupSummary {
  int n = 0;
  double mean = 0.0;
  double sd = 0.0;   // sample standard deviation (n - 1)
  double sem = 0.0;  // sd / sqrt(n)
};

GroupSummary summarize(std::span<const double> values);

struct WelchTest {
  double t_statistic = 0.0;
  double dof = 0.0;
  double p_value = 1.0;
};

/// Welch's unequal-variance t-test of mean(a) - mean(b). nullopt when either
/// group has fewer than two values.
std::optional<WelchTest> welch_t_test(std::span<const double> a, std::span<const double> b);

/// One-sample t-test of mean(values) against zero.
std::optional<WelchTest> one_sample_t_test(std::span<const double> values);

/// "***", "**", "*" at 0.001 / 0.01 / 0.05, else "ns".
std::string significance_stars(double p);

}  // namespace statusarena
