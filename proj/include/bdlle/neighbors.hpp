#pragma once

#include "bdlle/samplers.hpp"

#include <Eigen/Dense>

#include <variant>
#include <vector>

namespace bdlle {

struct EpsilonBall {
    double eps;
};

struct Knn {
    long k;
};

using NeighborScheme = std::variant<EpsilonBall, Knn>;

/// Per-point neighbor lists (self excluded), sorted by (distance, index).
struct NeighborGraph {
    NeighborScheme scheme;
    std::vector<std::vector<long>> neighbors;
    std::vector<std::vector<double>> distances;

    long size() const { return static_cast<long>(neighbors.size()); }
    long degree(long k) const { return static_cast<long>(neighbors[static_cast<size_t>(k)].size()); }
    std::vector<long> isolated_points() const;
    bool is_epsilon_ball() const { return std::holds_alternative<EpsilonBall>(scheme); }
};

/// Exact neighbor search through a uniform grid over the first min(p, 3)
/// coordinates. Membership in the eps-ball is strict: ||x_j - x_k|| < eps.
/// KNN ties are broken by ascending index.
NeighborGraph build_graph(const Eigen::MatrixXd& points, const NeighborScheme& scheme);
NeighborGraph build_graph(const PointCloud& cloud, const NeighborScheme& scheme);

/// O(n^2) reference search with identical distance arithmetic.
NeighborGraph build_graph_brute_force(const Eigen::MatrixXd& points, const NeighborScheme& scheme);

/// p x N_k matrix whose column j is x_{k,j} - x_k.
Eigen::MatrixXd local_data_matrix(const Eigen::MatrixXd& points, const NeighborGraph& graph, long k);
Eigen::MatrixXd local_data_matrix(const PointCloud& cloud, const NeighborGraph& graph, long k);

} // namespace bdlle
