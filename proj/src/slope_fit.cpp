#include "jgreedy/slope_fit.hpp"

#include <algorithm>
#include <cmath>

#include "jgreedy/errors.hpp"

namespace jgreedy {

double SlopeFit::predict(double x) const { return std::exp(intercept + slope * std::log(x)); }

LinearFit fit_linear(const std::vector<double>& ts, const std::vector<double>& ys) {
  if (ts.size() != ys.size()) throw ConfigError("fit: length mismatch");
  if (ts.size() < 2) throw ConfigError("fit: need at least two points");
  const double n = static_cast<double>(ts.size());
  double st = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    st += ts[i];
    sy += ys[i];
  }
  const double mt = st / n;
  const double my = sy / n;
  double stt = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    stt += (ts[i] - mt) * (ts[i] - mt);
    sty += (ts[i] - mt) * (ys[i] - my);
  }
  if (!(stt > 0.0)) throw ConfigError("fit: abscissae are all equal");
  LinearFit f;
  f.slope = sty / stt;
  f.intercept = my - f.slope * mt;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double r = std::abs(ys[i] - (f.intercept + f.slope * ts[i]));
    f.max_relative_residual = std::max(f.max_relative_residual, ys[i] != 0.0 ? r / std::abs(ys[i]) : r);
  }
  return f;
}

SlopeFit fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw ConfigError("fit: length mismatch");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) throw ConfigError("log-log fit requires positive data");
    lx.push_back(std::log(xs[i]));
    ly.push_back(std::log(ys[i]));
  }
  const LinearFit lin = fit_linear(lx, ly);
  SlopeFit f;
  f.xs = xs;
  f.ys = ys;
  f.slope = lin.slope;
  f.intercept = lin.intercept;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    f.max_residual = std::max(f.max_residual, std::abs(ly[i] - (f.intercept + f.slope * lx[i])));
  }
  return f;
}

SlopeFit fit_loglog_trimmed(const std::vector<double>& xs, const std::vector<double>& ys,
                            double tolerance) {
  SlopeFit f = fit_loglog(xs, ys);
  if (f.max_residual > 2.0 * tolerance && xs.size() >= 4) {
    const auto first = std::min_element(xs.begin(), xs.end()) - xs.begin();
    std::vector<double> tx, ty;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (static_cast<std::ptrdiff_t>(i) == first) continue;
      tx.push_back(xs[i]);
      ty.push_back(ys[i]);
    }
    SlopeFit trimmed = fit_loglog(tx, ty);
    trimmed.dropped_first = true;
    trimmed.dropped_x = xs[static_cast<std::size_t>(first)];
    return trimmed;
  }
  return f;
}

}  // namespace jgreedy
