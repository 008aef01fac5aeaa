#pragma once

#include <functional>
#include <vector>

namespace feegame {

using Integrand = std::function<double(double)>;

// Adaptive Simpson rule with one Richardson step per panel.
double adaptive_simpson(const Integrand& f, double a, double b, double tol = 1e-11, int max_depth = 40);

// Integrates over [a,b] panel by panel between the given breakpoints so that
// kinks of the integrand never fall inside a panel.
double piecewise_integral(const Integrand& f, double a, double b, std::vector<double> breakpoints,
                          double tol = 1e-11);

// Area under a sampled curve.
double trapezoid_samples(const std::vector<double>& t, const std::vector<double>& v);

}  // namespace feegame
