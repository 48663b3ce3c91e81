#include "bdlle/samplers.hpp"

#include "bdlle/error.hpp"
#include "bdlle/quadrature.hpp"
#include "bdlle/rng.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

namespace bdlle {

namespace {

constexpr double kPi = std::numbers::pi;

void require_positive(long n, const char* what)
{
    if (n < 1) {
        throw EmptyInputError(std::string(what) + ": sample count must be at least 1");
    }
}

Eigen::VectorXd vec(std::initializer_list<double> values)
{
    Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) {
        v(i++) = x;
    }
    return v;
}

} // namespace

std::string_view to_string(ManifoldTag tag)
{
    switch (tag) {
    case ManifoldTag::interval: return "interval";
    case ManifoldTag::disk: return "disk";
    case ManifoldTag::curve_m3: return "curve";
    case ManifoldTag::surface: return "surface";
    case ManifoldTag::torus: return "torus";
    case ManifoldTag::gaussian_null: return "gaussian";
    case ManifoldTag::custom: return "custom";
    }
    return "custom";
}

ManifoldTag manifold_from_string(std::string_view name)
{
    for (auto tag : {ManifoldTag::interval, ManifoldTag::disk, ManifoldTag::curve_m3,
                     ManifoldTag::surface, ManifoldTag::torus, ManifoldTag::gaussian_null,
                     ManifoldTag::custom}) {
        if (to_string(tag) == name) {
            return tag;
        }
    }
    throw ParameterError("unknown manifold '" + std::string(name) + "'");
}

Eigen::VectorXd PointCloud::boundary_distances() const
{
    if (ground_truth.empty()) {
        throw ValidationError("cloud carries no boundary distances");
    }
    Eigen::VectorXd out(size());
    for (long i = 0; i < size(); ++i) {
        out(i) = ground_truth[static_cast<size_t>(i)].boundary_dist;
    }
    return out;
}

PointCloud make_cloud(Eigen::MatrixXd points, int intrinsic_dim, ManifoldTag tag)
{
    if (points.rows() < 1) {
        throw EmptyInputError("make_cloud: no points");
    }
    if (intrinsic_dim < 1 || intrinsic_dim > points.cols()) {
        throw ParameterError("make_cloud: need 1 <= d <= p");
    }
    PointCloud cloud;
    cloud.points = std::move(points);
    cloud.intrinsic_dim = intrinsic_dim;
    cloud.tag = tag;
    return cloud;
}

PointCloud sample_interval(long n, std::uint64_t seed)
{
    require_positive(n, "sample_interval");
    CounterRng rng(seed);
    PointCloud cloud;
    cloud.points.resize(n, 1);
    cloud.intrinsic_dim = 1;
    cloud.seed = seed;
    cloud.tag = ManifoldTag::interval;
    cloud.ground_truth.resize(static_cast<size_t>(n));
    for (long i = 0; i < n; ++i) {
        const double t = rng.uniform();
        cloud.points(i, 0) = t;
        auto& gt = cloud.ground_truth[static_cast<size_t>(i)];
        gt.param_coords = vec({t});
        gt.boundary_dist = std::min(t, 1.0 - t);
        gt.outward_normal_tangent = vec({t < 0.5 ? -1.0 : 1.0});
    }
    return cloud;
}

PointCloud sample_disk(long n_raw, std::uint64_t seed)
{
    require_positive(n_raw, "sample_disk");
    CounterRng rng(seed);
    PointCloud cloud;
    cloud.intrinsic_dim = 2;
    cloud.seed = seed;
    cloud.tag = ManifoldTag::disk;
    cloud.raw_params.resize(n_raw, 2);
    cloud.retained.resize(static_cast<size_t>(n_raw));
    std::vector<Eigen::Vector2d> kept;
    kept.reserve(static_cast<size_t>(n_raw));
    for (long i = 0; i < n_raw; ++i) {
        const double x = rng.uniform(-1.0, 1.0);
        const double y = rng.uniform(-1.0, 1.0);
        cloud.raw_params(i, 0) = x;
        cloud.raw_params(i, 1) = y;
        const bool keep = x * x + y * y <= 1.0;
        cloud.retained[static_cast<size_t>(i)] = keep;
        if (keep) {
            kept.emplace_back(x, y);
        }
    }
    const auto n = static_cast<long>(kept.size());
    if (n == 0) {
        throw EmptyInputError("sample_disk: no draw landed in the unit disk");
    }
    cloud.points.resize(n, 2);
    cloud.ground_truth.resize(kept.size());
    for (long i = 0; i < n; ++i) {
        const auto& q = kept[static_cast<size_t>(i)];
        cloud.points.row(i) = q.transpose();
        const double r = q.norm();
        auto& gt = cloud.ground_truth[static_cast<size_t>(i)];
        gt.param_coords = q;
        gt.boundary_dist = 1.0 - r;
        if (r > 0.0) {
            gt.outward_normal_tangent = Eigen::VectorXd(q / r);
        }
    }
    return cloud;
}

Eigen::Vector3d curve_m3_point(double t)
{
    return {t, std::log(0.5 + t), std::cos(kPi * t)};
}

double curve_m3_speed(double t)
{
    const Eigen::Vector3d d(1.0, 1.0 / (0.5 + t), -kPi * std::sin(kPi * t));
    return d.norm();
}

double curve_m3_arclength(double t)
{
    return quad::adaptive_simpson(curve_m3_speed, 0.0, t, 1e-11);
}

PointCloud sample_curve_m3(long n, std::uint64_t seed)
{
    require_positive(n, "sample_curve_m3");
    CounterRng rng(seed);
    const double total = curve_m3_arclength(1.0);
    PointCloud cloud;
    cloud.points.resize(n, 3);
    cloud.intrinsic_dim = 1;
    cloud.seed = seed;
    cloud.tag = ManifoldTag::curve_m3;
    cloud.ground_truth.resize(static_cast<size_t>(n));
    for (long i = 0; i < n; ++i) {
        const double t = rng.uniform();
        cloud.points.row(i) = curve_m3_point(t).transpose();
        const double s = curve_m3_arclength(t);
        auto& gt = cloud.ground_truth[static_cast<size_t>(i)];
        gt.param_coords = vec({t});
        gt.boundary_dist = std::min(s, total - s);
        const Eigen::Vector3d tangent =
            Eigen::Vector3d(1.0, 1.0 / (0.5 + t), -kPi * std::sin(kPi * t)).normalized();
        gt.outward_normal_tangent = Eigen::VectorXd(s < total - s ? -tangent : tangent);
    }
    return cloud;
}

Eigen::Vector3d surface_point(double x, double y)
{
    return {x, y, x * x - y * y * y};
}

PointCloud sample_surface(long n_raw, std::uint64_t seed)
{
    require_positive(n_raw, "sample_surface");
    PointCloud planar = sample_disk(n_raw, seed);
    PointCloud cloud;
    cloud.intrinsic_dim = 2;
    cloud.seed = seed;
    cloud.tag = ManifoldTag::surface;
    cloud.boundary_dist_exact = false;
    cloud.raw_params = std::move(planar.raw_params);
    cloud.retained = std::move(planar.retained);
    const long n = planar.size();
    cloud.points.resize(n, 3);
    cloud.ground_truth.resize(static_cast<size_t>(n));
    for (long i = 0; i < n; ++i) {
        const double x = planar.points(i, 0);
        const double y = planar.points(i, 1);
        cloud.points.row(i) = surface_point(x, y).transpose();
        auto& gt = cloud.ground_truth[static_cast<size_t>(i)];
        gt.param_coords = vec({x, y});
        // Parameter-plane proxy 1 - r; not the geodesic distance on the surface.
        gt.boundary_dist = planar.ground_truth[static_cast<size_t>(i)].boundary_dist;
        const double r = std::hypot(x, y);
        if (r > 0.0) {
            const Eigen::Vector3d radial = (x / r) * Eigen::Vector3d(1.0, 0.0, 2.0 * x) +
                                           (y / r) * Eigen::Vector3d(0.0, 1.0, -3.0 * y * y);
            gt.outward_normal_tangent = Eigen::VectorXd(radial.normalized());
        }
    }
    return cloud;
}

Eigen::Vector3d torus_point(double theta, double phi)
{
    // Third coordinate follows the published parametrization verbatim.
    const double ring = 3.0 + 1.2 * std::cos(theta);
    return {ring * std::cos(phi), ring * std::sin(phi), 1.2 * std::sin(phi)};
}

bool torus_retained(double theta, double phi)
{
    return (3.0 + 1.2 * std::cos(theta)) * std::cos(phi) > -3.4;
}

PointCloud sample_truncated_torus(long n_raw, std::uint64_t seed)
{
    require_positive(n_raw, "sample_truncated_torus");
    CounterRng rng(seed);
    PointCloud cloud;
    cloud.intrinsic_dim = 2;
    cloud.seed = seed;
    cloud.tag = ManifoldTag::torus;
    cloud.raw_params.resize(n_raw, 2);
    cloud.retained.resize(static_cast<size_t>(n_raw));
    std::vector<long> kept;
    for (long i = 0; i < n_raw; ++i) {
        const double theta = rng.uniform(0.0, 2.0 * kPi);
        const double phi = rng.uniform(0.0, 2.0 * kPi);
        cloud.raw_params(i, 0) = theta;
        cloud.raw_params(i, 1) = phi;
        const bool keep = torus_retained(theta, phi);
        cloud.retained[static_cast<size_t>(i)] = keep;
        if (keep) {
            kept.push_back(i);
        }
    }
    if (kept.empty()) {
        throw EmptyInputError("sample_truncated_torus: every draw was truncated");
    }
    cloud.points.resize(static_cast<long>(kept.size()), 3);
    for (size_t j = 0; j < kept.size(); ++j) {
        const long i = kept[j];
        cloud.points.row(static_cast<long>(j)) =
            torus_point(cloud.raw_params(i, 0), cloud.raw_params(i, 1)).transpose();
    }
    return cloud;
}

PointCloud sample_gaussian_null(long n, long p, std::uint64_t seed)
{
    require_positive(n, "sample_gaussian_null");
    if (p < 1) {
        throw ParameterError("sample_gaussian_null: dimension must be at least 1");
    }
    CounterRng rng(seed);
    PointCloud cloud;
    cloud.points.resize(n, p);
    for (long i = 0; i < n; ++i) {
        for (long j = 0; j < p; ++j) {
            cloud.points(i, j) = rng.normal();
        }
    }
    cloud.intrinsic_dim = static_cast<int>(p);
    cloud.seed = seed;
    cloud.tag = ManifoldTag::gaussian_null;
    return cloud;
}

PointCloud circle_grid(long n)
{
    if (n < 3) {
        throw ParameterError("circle_grid: need at least 3 points");
    }
    Eigen::MatrixXd pts(n, 2);
    for (long i = 0; i < n; ++i) {
        const double angle = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n);
        pts(i, 0) = std::cos(angle);
        pts(i, 1) = std::sin(angle);
    }
    return make_cloud(std::move(pts), 1);
}

PointCloud ten_point_fixture()
{
    Eigen::MatrixXd pts(10, 3);
    pts << -0.56, -0.34, 1.03,
           -0.51, 0.32, -0.02,
           -0.53, -1.47, -0.57,
           1.34, 0.47, -0.15,
           1.01, -1.56, 1.22,
           -0.55, -1.0, -0.07,
           0.09, -1.04, -0.2,
           -1.27, 2.07, -0.9,
           1.26, -0.71, -1.2,
           1.46, 0.0, 0.61;
    return make_cloud(std::move(pts), 3);
}

void write_cloud_csv(std::ostream& out, const PointCloud& cloud)
{
    const long p = cloud.ambient_dim();
    const bool with_bdist = cloud.has_boundary_dist();
    for (long j = 0; j < p; ++j) {
        out << (j ? "," : "") << 'x' << (j + 1);
    }
    if (with_bdist) {
        out << ",bdist";
    }
    out << '\n';
    char buf[32];
    for (long i = 0; i < cloud.size(); ++i) {
        for (long j = 0; j < p; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", cloud.points(i, j));
            out << (j ? "," : "") << buf;
        }
        if (with_bdist) {
            std::snprintf(buf, sizeof buf, "%.17g",
                          cloud.ground_truth[static_cast<size_t>(i)].boundary_dist);
            out << ',' << buf;
        }
        out << '\n';
    }
}

} // namespace bdlle
