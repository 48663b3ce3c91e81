#pragma once

#include <functional>
#include <vector>

namespace bdlle::quad {

struct GaussRule {
    std::vector<double> nodes;   // on [-1, 1]
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton iteration on P_n).
GaussRule gauss_legendre(int n);

/// Adaptive Simpson with Richardson correction; abs_tol is the global target.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, int max_depth = 50);

/// Adaptive 15-point Gauss-Kronrod on [a, b].
double gauss_kronrod(const std::function<double(double)>& f, double a, double b,
                     double abs_tol);

} // namespace bdlle::quad
