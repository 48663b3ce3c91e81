#include "bdlle/analytic.hpp"

#include "bdlle/error.hpp"
#include "bdlle/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>

namespace bdlle::analytic {

namespace {

constexpr double kPi = std::numbers::pi;
const double kSqrt3 = std::sqrt(3.0);

void check_dim(int d)
{
    if (d < 1) {
        throw ParameterError("intrinsic dimension must be at least 1");
    }
}

void check_t(double t)
{
    if (!(t >= 0.0)) {
        throw ParameterError("t must be nonnegative");
    }
}

} // namespace

double sphere_volume(int m)
{
    if (m < 0) {
        throw ParameterError("sphere_volume: m must be nonnegative");
    }
    const double h = 0.5 * (m + 1);
    return 2.0 * std::pow(kPi, h) / std::tgamma(h);
}

double ball_factor(int d)
{
    check_dim(d);
    if (d == 1) {
        return 1.0;
    }
    return sphere_volume(d - 2) / (d - 1);
}

SphereRatioBounds sphere_ratio(int d)
{
    check_dim(d);
    const double dd = d;
    const double s1 = sphere_volume(d - 1);
    const double bf = ball_factor(d);
    return {(dd + 1) * (dd + 1) * (dd + 3) / (8.0 * dd * dd * (dd + 2) * (dd + 2)),
            bf * bf / (s1 * s1),
            (dd + 1) * (dd + 1) / (4.0 * dd * dd * (dd + 2))};
}

bool sphere_ratio_check(int d)
{
    return sphere_ratio(d).holds();
}

Coeffs::Coeffs(int dim, double bandwidth) : d(dim), eps(bandwidth)
{
    check_dim(dim);
    if (!(bandwidth > 0.0)) {
        throw ParameterError("bandwidth must be positive");
    }
}

double cap_integral(CapIntegral kind, int d, double s, IntegralMethod method)
{
    check_dim(d);
    s = std::clamp(s, 0.0, 1.0);
    if (method == IntegralMethod::automatic) {
        method = d <= 3 ? IntegralMethod::closed_form : IntegralMethod::quadrature;
    }
    if (method == IntegralMethod::closed_form) {
        if (d > 3) {
            throw ParameterError("cap_integral: closed forms exist for d <= 3 only");
        }
        const double s2 = s * s;
        const double root = std::sqrt(1.0 - s2);
        const double as = std::asin(s);
        switch (kind) {
        case CapIntegral::a:
            if (d == 1) return s;
            if (d == 2) return 0.5 * (s * root + as);
            return s - s * s2 / 3.0;
        case CapIntegral::b:
            if (d == 1) return s - s * s2 / 3.0;
            if (d == 2) return s * (5.0 - 2.0 * s2) * root / 8.0 + 3.0 * as / 8.0;
            return s - 2.0 * s * s2 / 3.0 + s * s2 * s2 / 5.0;
        case CapIntegral::c:
            if (d == 1) return s * s2 / 3.0;
            if (d == 2) return (as - s * (1.0 - 2.0 * s2) * root) / 8.0;
            return s * s2 / 3.0 - s * s2 * s2 / 5.0;
        }
    }
    const double half = 0.5 * (d - 1);
    std::function<double(double)> f;
    switch (kind) {
    case CapIntegral::a:
        f = [half](double x) { return std::pow(std::max(0.0, 1.0 - x * x), half); };
        break;
    case CapIntegral::b:
        f = [half](double x) { return std::pow(std::max(0.0, 1.0 - x * x), half + 1.0); };
        break;
    case CapIntegral::c:
        f = [half](double x) { return std::pow(std::max(0.0, 1.0 - x * x), half) * x * x; };
        break;
    }
    return quad::gauss_kronrod(f, 0.0, s, 1e-12);
}

double sigma(Sigma kind, double t, const Coeffs& c, IntegralMethod method)
{
    check_t(t);
    const int d = c.d;
    const double dd = d;
    const double sphere = sphere_volume(d - 1);
    const double bf = ball_factor(d);
    if (t >= c.eps) {
        switch (kind) {
        case Sigma::s0: return sphere / dd;
        case Sigma::s2:
        case Sigma::s2d: return sphere / (dd * (dd + 2));
        case Sigma::s1d:
        case Sigma::s3:
        case Sigma::s3d: return 0.0;
        }
    }
    const double s = t / c.eps;
    const double q = 1.0 - s * s;
    switch (kind) {
    case Sigma::s0:
        return sphere / (2 * dd) + bf * cap_integral(CapIntegral::a, d, s, method);
    case Sigma::s1d:
        return -bf / (dd + 1) * std::pow(q, 0.5 * (dd + 1));
    case Sigma::s2:
        return sphere / (2 * dd * (dd + 2)) + bf / (dd + 1) * cap_integral(CapIntegral::b, d, s, method);
    case Sigma::s2d:
        return sphere / (2 * dd * (dd + 2)) + bf * cap_integral(CapIntegral::c, d, s, method);
    case Sigma::s3:
        return -bf / ((dd + 1) * (dd + 3)) * std::pow(q, 0.5 * (dd + 3));
    case Sigma::s3d:
        return -bf / ((dd + 1) * (dd + 3)) * (2.0 + (dd + 1) * s * s) * std::pow(q, 0.5 * (dd + 1));
    }
    return 0.0;
}

double moments_oracle(int d, double eps, double t_bd, const std::vector<int>& v, int nodes)
{
    check_dim(d);
    if (static_cast<int>(v.size()) != d) {
        throw ParameterError("moments_oracle: multi-index must have d entries");
    }
    if (std::any_of(v.begin(), v.end(), [](int x) { return x < 0; })) {
        throw ParameterError("moments_oracle: negative multi-index entry");
    }
    if (std::accumulate(v.begin(), v.end(), 0) > 3) {
        throw ParameterError("moments_oracle: only moments of order <= 3 are supported");
    }
    if (!(eps > 0.0) || !(t_bd >= 0.0)) {
        throw ParameterError("moments_oracle: need eps > 0 and t_bd >= 0");
    }
    const quad::GaussRule rule = quad::gauss_legendre(nodes);

    // u_i = -R cos(theta), du_i = R sin(theta) dtheta; the remaining
    // coordinates live in a ball of radius R sin(theta).
    std::function<double(int, double)> integrate = [&](int level, double R) -> double {
        if (level < 0) {
            return 1.0;
        }
        double theta_max = kPi;
        if (level == d - 1) {
            const double upper = std::min(t_bd, R);
            theta_max = std::acos(std::clamp(-upper / R, -1.0, 1.0));
        }
        double total = 0.0;
        for (int q = 0; q < nodes; ++q) {
            const double theta = 0.5 * theta_max * (rule.nodes[static_cast<size_t>(q)] + 1.0);
            const double weight = 0.5 * theta_max * rule.weights[static_cast<size_t>(q)];
            const double st = std::sin(theta);
            const double u = -R * std::cos(theta);
            total += weight * R * st * std::pow(u, v[static_cast<size_t>(level)]) *
                     integrate(level - 1, R * st);
        }
        return total;
    };
    return integrate(d - 1, eps);
}

Phi phi(double t, const Coeffs& c)
{
    if (t >= c.eps) {
        const double interior = 1.0 / (2.0 * (c.d + 2));
        return {interior, interior};
    }
    const double s0 = sigma(Sigma::s0, t, c);
    const double s1d = sigma(Sigma::s1d, t, c);
    const double s2 = sigma(Sigma::s2, t, c);
    const double s2d = sigma(Sigma::s2d, t, c);
    const double s3 = sigma(Sigma::s3, t, c);
    const double s3d = sigma(Sigma::s3d, t, c);
    const double denom = s2d * s0 - s1d * s1d;
    return {0.5 * (s2d * s2 - s3 * s1d) / denom, 0.5 * (s2d * s2d - s3d * s1d) / denom};
}

double potential_V(double t, double P, const Coeffs& c)
{
    if (!(P > 0.0)) {
        throw ParameterError("potential_V: density must be positive");
    }
    const double s0 = sigma(Sigma::s0, t, c);
    const double s1d = sigma(Sigma::s1d, t, c);
    const double s2d = sigma(Sigma::s2d, t, c);
    return s1d / (P * (s2d * s0 - s1d * s1d));
}

double delta1(int d)
{
    check_dim(d);
    const double dd = d;
    const double ratio = (dd + 1) * sphere_volume(d - 1) / (2 * dd * (dd + 2) * ball_factor(d));
    const double inner = (1.0 + ratio) / (1.0 + std::sqrt(2.0 / (dd + 3)));
    return std::sqrt(1.0 - std::pow(inner, 2.0 / (dd + 1)));
}

double delta2(int d)
{
    check_dim(d);
    const double dd = d;
    const double inner =
        (dd + 1) * sphere_volume(d - 1) / (4 * dd * (dd + 2) * ball_factor(d)) + 1.0 / (dd + 3);
    return std::sqrt(1.0 - std::pow(inner, 2.0 / (dd + 1)));
}

double tstar(const Coeffs& c)
{
    auto residual = [&](double t) {
        const double s2d = sigma(Sigma::s2d, t, c);
        return s2d * s2d - sigma(Sigma::s3d, t, c) * sigma(Sigma::s1d, t, c);
    };
    double lo = 0.99 * delta1(c.d) * c.eps;
    double hi = std::min(1.01 * delta2(c.d), 1.0) * c.eps;
    double flo = residual(lo);
    const double fhi = residual(hi);
    if (!(flo < 0.0 && fhi > 0.0)) {
        throw Error("tstar: degeneracy root not bracketed for d = " + std::to_string(c.d));
    }
    while (hi - lo > 1e-13 * hi) {
        const double mid = 0.5 * (lo + hi);
        const double fm = residual(mid);
        if (fm == 0.0) {
            return mid;
        }
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double d_epsilon(double t, double P, double tangential_laplacian, double normal_second,
                 double normal_first, const Coeffs& c)
{
    const Phi ph = phi(t, c);
    return ph.phi1 * tangential_laplacian + ph.phi2 * normal_second +
           potential_V(t, P, c) * normal_first;
}

OneDimCoefficients one_dim_coefficients(double t, double a, double eps, double P)
{
    if (!(eps > 0.0) || !(a > 2.0 * eps)) {
        throw ParameterError("one-dimensional operator needs a > 2 eps > 0");
    }
    if (!(t >= 0.0 && t <= a)) {
        throw ParameterError("one-dimensional operator: t outside [0, a]");
    }
    if (!(P > 0.0)) {
        throw ParameterError("one-dimensional operator: density must be positive");
    }
    if (t <= eps) {
        const double s = t / eps;
        return {-(1.0 - 4.0 * s + s * s) / 12.0,
                6.0 * eps * eps * (eps - t) / (P * std::pow(eps + t, 3))};
    }
    if (t < a - eps) {
        return {1.0 / 6.0, 0.0};
    }
    const double s = (a - t) / eps;
    return {-(1.0 - 4.0 * s + s * s) / 12.0,
            -6.0 * eps * eps * (eps + t - a) / (P * std::pow(eps + a - t, 3))};
}

double d_epsilon_1d(double /*f*/, double f1, double f2, double t, double a, double eps, double P)
{
    const OneDimCoefficients k = one_dim_coefficients(t, a, eps, P);
    return k.second * f2 + k.first * f1;
}

namespace {

/// log g on [0, eps]; exponent of (t + eps) is -8 a eps so that g'/g = B/A.
double log_g(double t, double eps, double a)
{
    const double t1 = (2.0 - kSqrt3) * eps;
    const double t2 = (2.0 + kSqrt3) * eps;
    const double ae = a * eps;
    return (4.0 + 2.0 * kSqrt3) * ae * std::log(std::abs(t - t1)) +
           (4.0 - 2.0 * kSqrt3) * ae * std::log(std::abs(t - t2)) -
           8.0 * ae * std::log(t + eps) + 12.0 * a * eps * eps * eps / ((eps + t) * (eps + t)) +
           12.0 * a * eps * eps / (eps + t);
}

double g_fn(double t, double eps, double a)
{
    if (t == (2.0 - kSqrt3) * eps) {
        return 0.0;
    }
    return std::exp(log_g(t, eps, a));
}

double h_fn(double t, double eps, double a)
{
    const double t1 = (2.0 - kSqrt3) * eps;
    const double t2 = (2.0 + kSqrt3) * eps;
    if (t == t1) {
        return std::numeric_limits<double>::infinity();
    }
    return std::exp(log_g(t, eps, a) - std::log(std::abs(t - t1)) - std::log(std::abs(t - t2)));
}

} // namespace

SlFunctions sl_functions(double t, double eps, double a)
{
    if (!(eps > 0.0) || !(a > 2.0 * eps)) {
        throw ParameterError("sl_functions: need a > 2 eps > 0");
    }
    if (!(t >= 0.0 && t <= a)) {
        throw ParameterError("sl_functions: t outside [0, a]");
    }
    const double t1 = (2.0 - kSqrt3) * eps;
    const double wscale = 12.0 * eps * eps;
    // Reflect the right collar onto [0, eps].
    const double local = t <= eps ? t : (t >= a - eps ? a - t : eps);
    SlFunctions out{};
    out.g = g_fn(local, eps, a);
    out.h = h_fn(local, eps, a);
    out.p = local < t1 ? -out.g : out.g;
    out.w = wscale * out.h;
    return out;
}

double b_function(double t, const Coeffs& c)
{
    check_t(t);
    if (t >= c.eps) {
        return 0.0;
    }
    const double s1d = sigma(Sigma::s1d, t, c);
    return s1d * s1d / (sigma(Sigma::s0, t, c) * sigma(Sigma::s2d, t, c));
}

double b_at_boundary(int d)
{
    const double dd = d;
    const double bf = ball_factor(d);
    const double sphere = sphere_volume(d - 1);
    return 4.0 * dd * dd * (dd + 2) * bf * bf / ((dd + 1) * (dd + 1) * sphere * sphere);
}

double kernel_inf(int d)
{
    const double dd = d;
    return 1.0 - ball_factor(d) * 2.0 * dd * (dd + 2) / ((dd + 1) * sphere_volume(d - 1));
}

double kernel_boundary_slope(double t, const Coeffs& c)
{
    return -sigma(Sigma::s1d, t, c) / (sigma(Sigma::s2d, t, c) * c.eps);
}

DmCoeffs dm_coeffs(double t, const Coeffs& c)
{
    const double s0 = sigma(Sigma::s0, t, c);
    return {0.5 * sigma(Sigma::s2, t, c) / s0, 0.5 * sigma(Sigma::s2d, t, c) / s0,
            sigma(Sigma::s1d, t, c) / s0};
}

LocalCovReport local_cov_check(int d, double eps, double t_bd, double P, int p)
{
    check_dim(d);
    if (p < 0) {
        p = d + 1;
    }
    if (p < d) {
        throw ParameterError("local_cov_check: ambient dimension below d");
    }
    if (!(P > 0.0)) {
        throw ParameterError("local_cov_check: density must be positive");
    }
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(p, p);
    for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) {
            std::vector<int> v(static_cast<size_t>(d), 0);
            ++v[static_cast<size_t>(i)];
            ++v[static_cast<size_t>(j)];
            C(i, j) = C(j, i) = P * moments_oracle(d, eps, t_bd, v);
        }
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
    LocalCovReport r;
    r.eigenvalues = es.eigenvalues().reverse();

    const Coeffs c(d, eps);
    const double scale = std::pow(eps, d + 2);
    std::vector<double> expected;
    for (int i = 0; i + 1 < d; ++i) {
        expected.push_back(P * sigma(Sigma::s2, t_bd, c) * scale);
    }
    expected.push_back(P * sigma(Sigma::s2d, t_bd, c) * scale);
    std::sort(expected.begin(), expected.end(), std::greater<>());
    r.expected = Eigen::Map<Eigen::VectorXd>(expected.data(), d);

    for (int i = 0; i < d; ++i) {
        r.max_rel_error = std::max(r.max_rel_error,
                                   std::abs(r.eigenvalues(i) - r.expected(i)) / r.expected(i));
    }
    for (int i = d; i < p; ++i) {
        r.max_trailing = std::max(r.max_trailing, std::abs(r.eigenvalues(i)));
    }
    r.ok = r.max_rel_error <= 1e-3 && r.max_trailing <= 1e-8;
    return r;
}

} // namespace bdlle::analytic
