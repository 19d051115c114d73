#include "statusarena/stats.hpp"

#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

namespace statusarena {

double student_t_two_tailed_p(double t, double dof) {
  if (!std::isfinite(t)) return 0.0;
  if (!(dof > 0.0)) return 1.0;
  boost::math::students_t dist(dof);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
}

std::optional<OlsFit> ols(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3) return std::nullopt;
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 1e-12)) return std::nullopt;
  OlsFit fit;
  fit.n = static_cast<int>(x.size());
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    fit.residual_ss += r * r;
  }
  const double s2 = fit.residual_ss / (n - 2.0);
  fit.slope_se = std::sqrt(s2 / sxx);
  if (fit.slope_se > 0.0) {
    fit.t_statistic = fit.slope / fit.slope_se;
    fit.p_value = student_t_two_tailed_p(fit.t_statistic, n - 2.0);
  } else {
    // Perfect fit: any nonzero slope is certain.
    fit.t_statistic = fit.slope == 0.0 ? 0.0 : std::copysign(INFINITY, fit.slope);
    fit.p_value = fit.slope == 0.0 ? 1.0 : 0.0;
  }
  return fit;
}

GroupSummary summarize(std::span<const double> values) {
  GroupSummary g;
  g.n = static_cast<int>(values.size());
  if (values.empty()) return g;
  g.mean = std::accumulate(values.begin(), values.end(), 0.0) / g.n;
  if (g.n < 2) return g;
  double ss = 0.0;
  for (double v : values) ss += (v - g.mean) * (v - g.mean);
  g.sd = std::sqrt(ss / (g.n - 1));
  g.sem = g.sd / std::sqrt(static_cast<double>(g.n));
  return g;
}

std::optional<WelchTest> welch_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) return std::nullopt;
  const auto sa = summarize(a);
  const auto sb = summarize(b);
  const double va = sa.sd * sa.sd / sa.n;
  const double vb = sb.sd * sb.sd / sb.n;
  WelchTest w;
  const double diff = sa.mean - sb.mean;
  if (va + vb == 0.0) {
    w.t_statistic = diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff);
    w.dof = static_cast<double>(sa.n + sb.n - 2);
    w.p_value = diff == 0.0 ? 1.0 : 0.0;
    return w;
  }
  w.t_statistic = diff / std::sqrt(va + vb);
  w.dof = (va + vb) * (va + vb) / (va * va / (sa.n - 1) + vb * vb / (sb.n - 1));
  w.p_value = student_t_two_tailed_p(w.t_statistic, w.dof);
  return w;
}

std::optional<WelchTest> one_sample_t_test(std::span<const double> values) {
  if (values.size() < 2) return std::nullopt;
  const auto s = summarize(values);
  WelchTest w;
  w.dof = s.n - 1;
  if (s.sem == 0.0) {
    w.t_statistic = s.mean == 0.0 ? 0.0 : std::copysign(INFINITY, s.mean);
    w.p_value = s.mean == 0.0 ? 1.0 : 0.0;
    return w;
  }
  w.t_statistic = s.mean / s.sem;
  w.p_value = student_t_two_tailed_p(w.t_statistic, w.dof);
  return w;
}

std::string significance_stars(double p) {
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "ns";
}

}  // namespace statusarena
