#pragma once

#include <Eigen/Dense>

#include <vector>

/// Closed-form boundary-layer coefficients of the LLE operator on a
/// d-dimensional manifold with a flat boundary, and the quadrature oracles
/// that check them.
namespace bdlle::analytic {

/// |S^m| = 2 pi^((m+1)/2) / Gamma((m+1)/2).
double sphere_volume(int m);

/// |S^{d-2}| / (d - 1), the volume of the unit (d-1)-ball, defined to be 1 at d = 1.
/// Every sigma function goes through this one place.
double ball_factor(int d);

struct SphereRatioBounds {
    double lower;
    double middle; // |S^{d-2}|^2 / ((d-1)^2 |S^{d-1}|^2)
    double upper;
    bool holds() const { return lower < middle && middle < upper; }
};

SphereRatioBounds sphere_ratio(int d);
bool sphere_ratio_check(int d);

/// Dimension and bandwidth for every coefficient evaluation.
struct Coeffs {
    int d = 1;
    double eps = 1.0;
    /// |S^{d-2}|/(d-1) := 1 at d = 1 (always applied; recorded for reports).
    bool unit_convention_at_d1 = true;

    Coeffs(int dim, double bandwidth);
};

enum class Sigma { s0, s1d, s2, s2d, s3, s3d };

enum class CapIntegral {
    a, // int_0^s (1 - x^2)^((d-1)/2) dx
    b, // int_0^s (1 - x^2)^((d+1)/2) dx
    c, // int_0^s (1 - x^2)^((d-1)/2) x^2 dx
};

enum class IntegralMethod { automatic, closed_form, quadrature };

/// Closed form for d <= 3, adaptive Gauss-Kronrod (abs tol 1e-12) otherwise.
double cap_integral(CapIntegral kind, int d, double s, IntegralMethod method = IntegralMethod::automatic);

/// For t >= eps the interior constants are returned.
double sigma(Sigma kind, double t, const Coeffs& c,
             IntegralMethod method = IntegralMethod::automatic);

/// mu_v over {|u| <= eps, u_d <= t_bd} in R^d by nested Gauss-Legendre on
/// trigonometric substitutions. v has d entries with |v| <= 3.
double moments_oracle(int d, double eps, double t_bd, const std::vector<int>& v, int nodes = 48);

struct Phi {
    double phi1;
    double phi2;
};

Phi phi(double t, const Coeffs& c);

/// Drift coefficient V; P is the density at the point.
double potential_V(double t, double P, const Coeffs& c);

double delta1(int d);
double delta2(int d);

/// Degeneracy locus: root of sigma_{2,d}^2 = sigma_{3,d} sigma_{1,d} by
/// bisection on [0.99 delta1 eps, 1.01 delta2 eps].
double tstar(const Coeffs& c);

/// phi1 * sum_{i<d} f_ii + phi2 * f_dd + V * f_d; f_d is the outward-normal derivative.
double d_epsilon(double t, double P, double tangential_laplacian, double normal_second,
                 double normal_first, const Coeffs& c);

struct OneDimCoefficients {
    double second; // A
    double first;  // B
};

/// Coefficients of f'' and f' of the one-dimensional operator on [0, a].
OneDimCoefficients one_dim_coefficients(double t, double a, double eps, double P);

/// Three-branch one-dimensional operator applied to (f, f', f'') at t.
double d_epsilon_1d(double f, double f1, double f2, double t, double a, double eps, double P);

struct SlFunctions {
    double g;
    double h;
    double p;
    double w;
};

/// Sturm-Liouville form of the one-dimensional operator under uniform density
/// 1/a: (p f')' / w = A f'' + B f'. At the degeneracy h and w are +infinity and p is 0.
SlFunctions sl_functions(double t, double eps, double a);

/// Indicator limit sigma_{1,d}^2 / (sigma_0 sigma_{2,d}) inside the collar, 0 beyond.
double b_function(double t, const Coeffs& c);

/// Closed value of b_function at the boundary.
double b_at_boundary(int d);

/// Leading constant of inf K_eps.
double kernel_inf(int d);

/// -sigma_{1,d}(t) / (sigma_{2,d}(t) eps): slope of the kernel in u_d.
double kernel_boundary_slope(double t, const Coeffs& c);

struct DmCoeffs {
    double psi1;
    double psi2;
    double drift;
};

DmCoeffs dm_coeffs(double t, const Coeffs& c);

struct LocalCovReport {
    Eigen::VectorXd eigenvalues; // descending, size p
    Eigen::VectorXd expected;    // P * mu_{2e_i}, descending, size d
    double max_rel_error = 0.0;
    double max_trailing = 0.0;
    bool ok = false;
};

/// Local covariance of a flat patch with constant density, embedded in R^p.
LocalCovReport local_cov_check(int d, double eps, double t_bd, double P, int p = -1);

} // namespace bdlle::analytic
