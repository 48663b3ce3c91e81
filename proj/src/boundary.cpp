#include "bdlle/boundary.hpp"

#include "bdlle/error.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

namespace bdlle {

std::string_view to_string(BoundaryLabel label)
{
    return label == BoundaryLabel::boundary ? "boundary" : "interior";
}

std::string_view to_string(Region region)
{
    switch (region) {
    case Region::wave: return "wave";
    case Region::near_boundary: return "near_boundary";
    case Region::transition: return "transition";
    case Region::interior: return "interior";
    }
    return "interior";
}

namespace {

BoundaryReport empty_report(long n, int d)
{
    BoundaryReport r;
    r.b_values = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::quiet_NaN());
    r.missing.assign(static_cast<size_t>(n), true);
    r.d = d;
    return r;
}

} // namespace

BoundaryReport indicator(const LleMatrix& W)
{
    const long n = W.size();
    BoundaryReport r = empty_report(n, W.meta.d);
    const double c = W.meta.c;
    for (long k = 0; k < n; ++k) {
        const double nk = static_cast<double>(W.degree[static_cast<size_t>(k)]);
        if (nk == 0) {
            continue;
        }
        r.b_values(k) = (nk - c * W.y_sum[static_cast<size_t>(k)]) / nk;
        r.missing[static_cast<size_t>(k)] = false;
    }
    return r;
}

BoundaryReport indicator(const PointCloud& cloud, const NeighborGraph& graph,
                         const RegularizerRule& rule)
{
    const long n = cloud.size();
    if (graph.size() != n) {
        throw DimensionError("indicator: graph and cloud sizes differ");
    }
    const double c = resolve_regularizer(rule, graph, n, cloud.intrinsic_dim);
    BoundaryReport r = empty_report(n, cloud.intrinsic_dim);
#pragma omp parallel for schedule(dynamic, 64)
    for (long k = 0; k < n; ++k) {
        const long nk = graph.degree(k);
        if (nk == 0) {
            continue;
        }
        const BarycentricSolution s = solve_barycentric(local_data_matrix(cloud, graph, k), c);
        r.b_values(k) = (static_cast<double>(nk) - c * s.y_sum) / static_cast<double>(nk);
        r.missing[static_cast<size_t>(k)] = false;
    }
    if (cloud.has_boundary_dist()) {
        r.bdist = cloud.boundary_distances();
    }
    return r;
}

double default_threshold(int d)
{
    return analytic::b_at_boundary(d) * std::pow(0.75, d + 1) / 2.0;
}

void classify(BoundaryReport& report, double tau, std::ostream* warn)
{
    if (tau <= 0.0 && warn != nullptr) {
        *warn << "warning: threshold " << tau << " labels every point as boundary\n";
    }
    report.threshold = tau;
    report.labels.assign(static_cast<size_t>(report.size()), BoundaryLabel::interior);
    for (long k = 0; k < report.size(); ++k) {
        const size_t i = static_cast<size_t>(k);
        if (report.missing[i]) {
            continue;
        }
        // tau = 0 is documented as "everything", including B_k = 0 exactly.
        if (report.b_values(k) > tau || tau <= 0.0) {
            report.labels[i] = BoundaryLabel::boundary;
        }
    }
}

Region region_of(double dist, double eps, double tstar_val)
{
    if (dist < tstar_val) return Region::wave;
    if (dist < eps) return Region::near_boundary;
    if (dist <= 2.0 * eps) return Region::transition;
    return Region::interior;
}

std::vector<Region> partition_regions(const Eigen::VectorXd& dist, double eps, double tstar_val)
{
    if (!(eps > 0.0)) {
        throw ParameterError("partition_regions: eps must be positive");
    }
    std::vector<Region> out(static_cast<size_t>(dist.size()));
    for (Eigen::Index k = 0; k < dist.size(); ++k) {
        out[static_cast<size_t>(k)] = region_of(dist(k), eps, tstar_val);
    }
    return out;
}

double distance_proxy(double b, const analytic::Coeffs& c)
{
    if (!(b > 0.0)) {
        return std::numeric_limits<double>::infinity();
    }
    if (b >= analytic::b_function(0.0, c)) {
        return 0.0;
    }
    // b_function decreases from B(0) to 0 on [0, eps].
    double lo = 0.0;
    double hi = c.eps;
    for (int it = 0; it < 200 && hi - lo > 1e-14 * c.eps; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (analytic::b_function(mid, c) > b) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

std::vector<Region> partition_regions(const PointCloud& cloud, double eps, double tstar_val,
                                      const BoundaryReport* report)
{
    if (cloud.has_boundary_dist()) {
        return partition_regions(cloud.boundary_distances(), eps, tstar_val);
    }
    if (report == nullptr) {
        throw ValidationError("partition_regions: no boundary distances and no indicator");
    }
    if (report->size() != cloud.size()) {
        throw DimensionError("partition_regions: report size differs from cloud");
    }
    const analytic::Coeffs coeffs(cloud.intrinsic_dim, eps);
    Eigen::VectorXd dist(report->size());
    for (long k = 0; k < report->size(); ++k) {
        dist(k) = report->missing[static_cast<size_t>(k)]
                      ? std::numeric_limits<double>::infinity()
                      : distance_proxy(report->b_values(k), coeffs);
    }
    return partition_regions(dist, eps, tstar_val);
}

ClippedMatrix clip(const SparseRowMatrix& W, const std::vector<Region>& regions)
{
    if (static_cast<long>(regions.size()) != W.rows() || W.rows() != W.cols()) {
        throw DimensionError("clip: region labels must match a square matrix");
    }
    ClippedMatrix out;
    out.old_to_new.assign(regions.size(), -1);
    for (size_t k = 0; k < regions.size(); ++k) {
        if (regions[k] != Region::wave) {
            out.old_to_new[k] = static_cast<long>(out.new_to_old.size());
            out.new_to_old.push_back(static_cast<long>(k));
        }
    }
    const long m = static_cast<long>(out.new_to_old.size());
    if (m == 0 && W.rows() > 0) {
        throw EmptyInputError("clip: every point lies in the wave region");
    }
    std::vector<Eigen::Triplet<double, long>> trip;
    trip.reserve(static_cast<size_t>(W.nonZeros()));
    for (long i = 0; i < m; ++i) {
        const long r = out.new_to_old[static_cast<size_t>(i)];
        for (SparseRowMatrix::InnerIterator it(W, r); it; ++it) {
            const long j = out.old_to_new[static_cast<size_t>(it.col())];
            if (j >= 0) {
                trip.emplace_back(i, j, it.value());
            }
        }
    }
    out.W.resize(m, m);
    out.W.setFromTriplets(trip.begin(), trip.end());
    out.W.makeCompressed();
    return out;
}

void write_report_csv(std::ostream& out, const BoundaryReport& report)
{
    const bool with_dist = report.bdist.has_value();
    out << "idx,B,label,region" << (with_dist ? ",bdist" : "") << '\n';
    char buf[64];
    for (long k = 0; k < report.size(); ++k) {
        const size_t i = static_cast<size_t>(k);
        out << k << ',';
        if (report.missing[i]) {
            out << "nan";
        } else {
            std::snprintf(buf, sizeof buf, "%.17g", report.b_values(k));
            out << buf;
        }
        out << ',' << (report.labeled() ? to_string(report.labels[i]) : std::string_view{})
            << ',' << (report.regions.empty() ? std::string_view{} : to_string(report.regions[i]));
        if (with_dist) {
            std::snprintf(buf, sizeof buf, "%.17g", (*report.bdist)(k));
            out << ',' << buf;
        }
        out << '\n';
    }
}

} // namespace bdlle
