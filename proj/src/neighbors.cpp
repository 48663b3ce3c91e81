#include "bdlle/neighbors.hpp"

#include "bdlle/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace bdlle {

namespace {

using Cell = std::array<long, 3>;

struct CellHash {
    size_t operator()(const Cell& c) const noexcept
    {
        size_t h = 1469598103934665603ULL;
        for (long v : c) {
            h ^= static_cast<size_t>(v) + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
        }
        return h;
    }
};

double distance(const Eigen::MatrixXd& pts, long a, long b)
{
    return (pts.row(a) - pts.row(b)).norm();
}

struct Candidate {
    double dist;
    long index;
    bool operator<(const Candidate& o) const
    {
        return dist < o.dist || (dist == o.dist && index < o.index);
    }
};

/// Uniform grid on the leading (at most three) coordinates. Projection never
/// increases distances, so cell-distance pruning is exact in any dimension.
class UniformGrid {
public:
    UniformGrid(const Eigen::MatrixXd& pts, double cell) : pts_(pts), cell_(cell)
    {
        dims_ = static_cast<int>(std::min<long>(3, pts.cols()));
        lo_.fill(0.0);
        for (int a = 0; a < dims_; ++a) {
            lo_[a] = pts.col(a).minCoeff();
        }
        min_cell_.fill(0);
        max_cell_.fill(0);
        for (long i = 0; i < pts.rows(); ++i) {
            const Cell c = cell_of(i);
            for (int a = 0; a < dims_; ++a) {
                max_cell_[a] = std::max(max_cell_[a], c[a]);
            }
            buckets_[c].push_back(i);
        }
    }

    Cell cell_of(long i) const
    {
        Cell c{0, 0, 0};
        for (int a = 0; a < dims_; ++a) {
            c[a] = static_cast<long>(std::floor((pts_(i, a) - lo_[a]) / cell_));
        }
        return c;
    }

    long max_ring() const
    {
        long r = 0;
        for (int a = 0; a < dims_; ++a) {
            r = std::max(r, max_cell_[a] - min_cell_[a]);
        }
        return r;
    }

    /// Visit the points of every cell at Chebyshev cell distance exactly r from c.
    template <class F>
    void visit_ring(const Cell& c, long r, F&& f) const
    {
        const long lo0 = dims_ > 0 ? -r : 0, hi0 = dims_ > 0 ? r : 0;
        const long lo1 = dims_ > 1 ? -r : 0, hi1 = dims_ > 1 ? r : 0;
        const long lo2 = dims_ > 2 ? -r : 0, hi2 = dims_ > 2 ? r : 0;
        for (long a = lo0; a <= hi0; ++a) {
            for (long b = lo1; b <= hi1; ++b) {
                for (long e = lo2; e <= hi2; ++e) {
                    if (std::max({std::abs(a), std::abs(b), std::abs(e)}) != r) {
                        continue;
                    }
                    const auto it = buckets_.find(Cell{c[0] + a, c[1] + b, c[2] + e});
                    if (it == buckets_.end()) {
                        continue;
                    }
                    for (long j : it->second) {
                        f(j);
                    }
                }
            }
        }
    }

    double cell() const { return cell_; }

private:
    const Eigen::MatrixXd& pts_;
    double cell_;
    int dims_ = 0;
    std::array<double, 3> lo_{};
    Cell min_cell_{};
    Cell max_cell_{};
    std::unordered_map<Cell, std::vector<long>, CellHash> buckets_;
};

void finish(NeighborGraph& g, long k, std::vector<Candidate>& cands, size_t keep)
{
    std::sort(cands.begin(), cands.end());
    if (cands.size() > keep) {
        cands.resize(keep);
    }
    auto& nb = g.neighbors[static_cast<size_t>(k)];
    auto& ds = g.distances[static_cast<size_t>(k)];
    nb.reserve(cands.size());
    ds.reserve(cands.size());
    for (const auto& c : cands) {
        nb.push_back(c.index);
        ds.push_back(c.dist);
    }
}

void validate(const Eigen::MatrixXd& points, const NeighborScheme& scheme)
{
    if (points.rows() < 1) {
        throw EmptyInputError("build_graph: empty point set");
    }
    if (const auto* ball = std::get_if<EpsilonBall>(&scheme)) {
        if (!(ball->eps > 0.0)) {
            throw ParameterError("build_graph: eps must be positive");
        }
    } else {
        const long k = std::get<Knn>(scheme).k;
        if (k < 1 || k >= points.rows()) {
            throw ParameterError("build_graph: KNN needs 1 <= K < n");
        }
    }
}

double knn_cell_size(const Eigen::MatrixXd& points, long k)
{
    // Median K-distance over a deterministic subsample.
    const long n = points.rows();
    const long samples = std::min<long>(n, 64);
    std::vector<double> kd;
    std::vector<double> row(static_cast<size_t>(n));
    for (long s = 0; s < samples; ++s) {
        const long i = s * n / samples;
        for (long j = 0; j < n; ++j) {
            row[static_cast<size_t>(j)] = j == i ? INFINITY : distance(points, i, j);
        }
        std::nth_element(row.begin(), row.begin() + (k - 1), row.end());
        kd.push_back(row[static_cast<size_t>(k - 1)]);
    }
    std::nth_element(kd.begin(), kd.begin() + static_cast<long>(kd.size() / 2), kd.end());
    const double med = kd[kd.size() / 2];
    return med > 0.0 ? med : 1.0;
}

} // namespace

std::vector<long> NeighborGraph::isolated_points() const
{
    std::vector<long> out;
    for (size_t i = 0; i < neighbors.size(); ++i) {
        if (neighbors[i].empty()) {
            out.push_back(static_cast<long>(i));
        }
    }
    return out;
}

NeighborGraph build_graph(const Eigen::MatrixXd& points, const NeighborScheme& scheme)
{
    validate(points, scheme);
    const long n = points.rows();
    NeighborGraph g{scheme, std::vector<std::vector<long>>(static_cast<size_t>(n)),
                    std::vector<std::vector<double>>(static_cast<size_t>(n))};

    if (const auto* ball = std::get_if<EpsilonBall>(&scheme)) {
        const double eps = ball->eps;
        const UniformGrid grid(points, eps);
#pragma omp parallel for schedule(dynamic, 64)
        for (long k = 0; k < n; ++k) {
            std::vector<Candidate> cands;
            const Cell c = grid.cell_of(k);
            grid.visit_ring(c, 0, [&](long j) {
                if (j == k) return;
                const double d = distance(points, k, j);
                if (d < eps) cands.push_back({d, j});
            });
            grid.visit_ring(c, 1, [&](long j) {
                const double d = distance(points, k, j);
                if (d < eps) cands.push_back({d, j});
            });
            finish(g, k, cands, cands.size());
        }
        return g;
    }

    const long kk = std::get<Knn>(scheme).k;
    const UniformGrid grid(points, knn_cell_size(points, kk));
    const long max_ring = grid.max_ring();
#pragma omp parallel for schedule(dynamic, 16)
    for (long k = 0; k < n; ++k) {
        std::vector<Candidate> cands;
        const Cell c = grid.cell_of(k);
        for (long r = 0; r <= max_ring; ++r) {
            grid.visit_ring(c, r, [&](long j) {
                if (j != k) cands.push_back({distance(points, k, j), j});
            });
            if (static_cast<long>(cands.size()) >= kk) {
                std::nth_element(cands.begin(), cands.begin() + (kk - 1), cands.end());
                // Anything not yet visited is at projected distance >= r * cell.
                if (cands[static_cast<size_t>(kk - 1)].dist < static_cast<double>(r) * grid.cell()) {
                    break;
                }
            }
        }
        finish(g, k, cands, static_cast<size_t>(kk));
    }
    return g;
}

NeighborGraph build_graph(const PointCloud& cloud, const NeighborScheme& scheme)
{
    return build_graph(cloud.points, scheme);
}

NeighborGraph build_graph_brute_force(const Eigen::MatrixXd& points, const NeighborScheme& scheme)
{
    validate(points, scheme);
    const long n = points.rows();
    NeighborGraph g{scheme, std::vector<std::vector<long>>(static_cast<size_t>(n)),
                    std::vector<std::vector<double>>(static_cast<size_t>(n))};
    for (long k = 0; k < n; ++k) {
        std::vector<Candidate> cands;
        for (long j = 0; j < n; ++j) {
            if (j != k) {
                cands.push_back({distance(points, k, j), j});
            }
        }
        if (const auto* ball = std::get_if<EpsilonBall>(&scheme)) {
            std::erase_if(cands, [&](const Candidate& c) { return !(c.dist < ball->eps); });
            finish(g, k, cands, cands.size());
        } else {
            finish(g, k, cands, static_cast<size_t>(std::get<Knn>(scheme).k));
        }
    }
    return g;
}

Eigen::MatrixXd local_data_matrix(const Eigen::MatrixXd& points, const NeighborGraph& graph, long k)
{
    if (k < 0 || k >= graph.size()) {
        throw DimensionError("local_data_matrix: index out of range");
    }
    const auto& nb = graph.neighbors[static_cast<size_t>(k)];
    if (nb.empty()) {
        throw EmptyNeighborhoodError("local_data_matrix: point " + std::to_string(k) +
                                         " has no neighbors",
                                     {k});
    }
    Eigen::MatrixXd G(points.cols(), static_cast<long>(nb.size()));
    for (size_t j = 0; j < nb.size(); ++j) {
        G.col(static_cast<long>(j)) = (points.row(nb[j]) - points.row(k)).transpose();
    }
    return G;
}

Eigen::MatrixXd local_data_matrix(const PointCloud& cloud, const NeighborGraph& graph, long k)
{
    return local_data_matrix(cloud.points, graph, k);
}

} // namespace bdlle
