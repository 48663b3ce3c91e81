#include "bdlle/quadrature.hpp"

#include "bdlle/error.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <numbers>

namespace bdlle::quad {

GaussRule gauss_legendre(int n)
{
    if (n < 1) {
        throw ParameterError("gauss_legendre: need at least one node");
    }
    GaussRule rule;
    rule.nodes.assign(n, 0.0);
    rule.weights.assign(n, 2.0);
    if (n == 1) {
        return rule;
    }
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

namespace {

double simpson_step(const std::function<double(double)>& f, double a, double b, double fa,
                    double fm, double fb, double whole, double tol, int depth)
{
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, int max_depth)
{
    if (a == b) {
        return 0.0;
    }
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_step(f, a, b, fa, fm, fb, whole, abs_tol, max_depth);
}

double gauss_kronrod(const std::function<double(double)>& f, double a, double b,
                     double abs_tol)
{
    if (a == b) {
        return 0.0;
    }
    // boost's tolerance is relative to the L1 norm; the integrands here are O(1).
    // Its error estimate never drops below rounding noise on short intervals, so
    // the depth is raised step by step and the best estimate kept once the
    // error stops shrinking.
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    double best = 0.0;
    double best_err = std::numeric_limits<double>::infinity();
    for (unsigned depth = 4; depth <= 24; depth += 4) {
        double err = 0.0;
        double l1 = 0.0;
        const double v = GK::integrate(f, a, b, depth, abs_tol, &err, &l1);
        if (err >= best_err) {
            break;
        }
        best = v;
        best_err = err;
        if (err <= abs_tol * std::max(l1, 1.0)) {
            break;
        }
    }
    return best;
}

} // namespace bdlle::quad
