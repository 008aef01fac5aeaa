#include "feegame/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "feegame/errors.hpp"

namespace feegame {

namespace {

double simpson(double a, double fa, double b, double fb, double fm) { return (b - a) / 6.0 * (fa + 4.0 * fm + fb); }

double refine(const Integrand& f, double a, double fa, double b, double fb, double m, double fm, double whole,
              double tol, int level, int max_depth) {
  const double ml = 0.5 * (a + m);
  const double mr = 0.5 * (m + b);
  const double fml = f(ml);
  const double fmr = f(mr);
  const double left = simpson(a, fa, m, fm, fml);
  const double right = simpson(m, fm, b, fb, fmr);
  const double diff = left + right - whole;
  constexpr int min_level = 2;
  const bool settled = std::abs(diff) <= 15.0 * tol || std::abs(diff) <= 1e-15 * std::abs(left + right);
  if (level >= max_depth || (level >= min_level && settled)) return left + right + diff / 15.0;
  return refine(f, a, fa, m, fm, ml, fml, left, 0.5 * tol, level + 1, max_depth) +
         refine(f, m, fm, b, fb, mr, fmr, right, 0.5 * tol, level + 1, max_depth);
}

}  // namespace

double adaptive_simpson(const Integrand& f, double a, double b, double tol, int max_depth) {
  if (b == a) return 0.0;
  if (b < a) return -adaptive_simpson(f, b, a, tol, max_depth);
  // Start from a few fixed panels so that narrow features are not missed.
  constexpr int panels = 8;
  const double w = (b - a) / panels;
  double total = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double lo = a + k * w;
    const double hi = k + 1 == panels ? b : lo + w;
    const double m = 0.5 * (lo + hi);
    const double flo = f(lo);
    const double fhi = f(hi);
    const double fm = f(m);
    total += refine(f, lo, flo, hi, fhi, m, fm, simpson(lo, flo, hi, fhi, fm), tol / panels, 0, max_depth);
  }
  return total;
}

double piecewise_integral(const Integrand& f, double a, double b, std::vector<double> breakpoints, double tol) {
  breakpoints.erase(std::remove_if(breakpoints.begin(), breakpoints.end(),
                                   [&](double t) { return !(t > a && t < b); }),
                    breakpoints.end());
  breakpoints.push_back(a);
  breakpoints.push_back(b);
  std::sort(breakpoints.begin(), breakpoints.end());
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());
  const double pieces = static_cast<double>(breakpoints.size() - 1);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k) {
    total += adaptive_simpson(f, breakpoints[k], breakpoints[k + 1], tol / pieces);
  }
  return total;
}

double trapezoid_samples(const std::vector<double>& t, const std::vector<double>& v) {
  if (t.size() != v.size()) throw ConfigurationError("sample vectors differ in length");
  double total = 0.0;
  for (std::size_t k = 1; k < t.size(); ++k) total += 0.5 * (t[k] - t[k - 1]) * (v[k] + v[k - 1]);
  return total;
}

}  // namespace feegame
