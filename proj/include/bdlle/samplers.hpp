#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace bdlle {

enum class ManifoldTag { interval, disk, curve_m3, surface, torus, gaussian_null, custom };

std::string_view to_string(ManifoldTag tag);
ManifoldTag manifold_from_string(std::string_view name);

/// Analytic information about one sampled point.
struct GroundTruth {
    Eigen::VectorXd param_coords;
    double boundary_dist = 0.0;
    std::optional<Eigen::VectorXd> outward_normal_tangent;
};

/// n x p sample with optional analytic ground truth. Immutable once built.
struct PointCloud {
    Eigen::MatrixXd points; // n x p, one point per row
    int intrinsic_dim = 1;
    std::vector<GroundTruth> ground_truth; // empty or size n
    bool boundary_dist_exact = true;       // false when boundary_dist is a proxy
    std::uint64_t seed = 0;
    ManifoldTag tag = ManifoldTag::custom;

    // Rejection samplers keep every raw draw so the retention rule can be audited.
    Eigen::MatrixXd raw_params;     // n_raw x q
    std::vector<bool> retained;     // size n_raw

    long size() const { return points.rows(); }
    long ambient_dim() const { return points.cols(); }
    bool has_boundary_dist() const { return !ground_truth.empty(); }
    Eigen::VectorXd boundary_distances() const;
};

/// Build a cloud from raw coordinates (no ground truth).
PointCloud make_cloud(Eigen::MatrixXd points, int intrinsic_dim, ManifoldTag tag = ManifoldTag::custom);

PointCloud sample_interval(long n, std::uint64_t seed);
PointCloud sample_disk(long n_raw, std::uint64_t seed);
PointCloud sample_curve_m3(long n, std::uint64_t seed);
PointCloud sample_surface(long n_raw, std::uint64_t seed);
PointCloud sample_truncated_torus(long n_raw, std::uint64_t seed);
PointCloud sample_gaussian_null(long n, long p, std::uint64_t seed);

/// Uniform grid of 2m points on the unit circle, x_i = (cos 2pi(i-1)/n, sin 2pi(i-1)/n).
PointCloud circle_grid(long n);

/// The ten R^3 points for which the 5-NN LLE matrix has spectral radius > 1.
PointCloud ten_point_fixture();

// Parametrizations, exposed for ground-truth checks.
Eigen::Vector3d curve_m3_point(double t);
double curve_m3_speed(double t);
/// Arclength from 0 to t along the M3 curve (adaptive Simpson, tol 1e-8).
double curve_m3_arclength(double t);
Eigen::Vector3d surface_point(double x, double y);
Eigen::Vector3d torus_point(double theta, double phi);
bool torus_retained(double theta, double phi);

/// CSV: header x1,...,xp[,bdist]; 17 significant digits.
void write_cloud_csv(std::ostream& out, const PointCloud& cloud);

} // namespace bdlle
