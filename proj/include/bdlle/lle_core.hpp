#pragma once

#include "bdlle/neighbors.hpp"
#include "bdlle/samplers.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

namespace bdlle {

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, long>;

/// Solution of (G^T G + c I) y = 1 and its normalization w = y / (1^T y).
struct BarycentricSolution {
    Eigen::VectorXd y; // unnormalized kernel values
    Eigen::VectorXd w; // barycentric weights, sum to one
    double y_sum = 0.0;
    double c = 0.0;
};

enum class SolvePath {
    automatic, // p x p eigen route when N > p, direct N x N solve otherwise
    direct,
    eigen_route,
};

BarycentricSolution solve_barycentric(const Eigen::MatrixXd& G, double c,
                                      SolvePath path = SolvePath::automatic);

/// T_n = U I_{p,r} (Lambda + c I)^{-1} U^T G 1 from the eigendecomposition of G G^T.
/// r counts eigenvalues above max(p, N) * machine-eps * lambda_max.
Eigen::VectorXd augmented_vector_discrete(const Eigen::MatrixXd& G, double c);

struct FixedRegularizer {
    double c;
};

/// c = n * eps^(d + 3); eps defaults to the radius of an eps-ball graph.
struct PaperRegularizer {
    std::optional<double> eps;
};

using RegularizerRule = std::variant<FixedRegularizer, PaperRegularizer>;

struct LleMetadata {
    NeighborScheme scheme = EpsilonBall{0.0};
    std::optional<double> eps;
    std::optional<long> k;
    double c = 0.0;
    int d = 1;
    std::uint64_t seed = 0;
};

/// Row-form LLE matrix with the per-row kernel vectors kept for reuse.
struct LleMatrix {
    SparseRowMatrix W;
    std::vector<Eigen::VectorXd> y;     // y_k in neighbor order
    std::vector<double> y_sum;
    std::vector<long> degree;           // N_k
    LleMetadata meta;

    long size() const { return W.rows(); }
};

double resolve_regularizer(const RegularizerRule& rule, const NeighborGraph& graph, long n, int d);

/// Assembles W row by row. Rows are independent and solved in parallel; the
/// result does not depend on the execution order.
LleMatrix build_lle_matrix(const PointCloud& cloud, const NeighborGraph& graph,
                           const RegularizerRule& rule);

/// (W - I) f
Eigen::VectorXd apply_shifted(const SparseRowMatrix& W, const Eigen::VectorXd& f);
Eigen::VectorXd apply_shifted(const LleMatrix& W, const Eigen::VectorXd& f);

struct AlphaKernelMatrix {
    SparseRowMatrix W;
    std::vector<long> degenerate_rows; // left unnormalized
};

/// Rows alpha * 1 + (1 - alpha) * (-G^T T_n) on the neighbor pattern, divided by
/// their sum. alpha = 1/2 reproduces the LLE rows.
AlphaKernelMatrix build_alpha_kernel_matrix(const PointCloud& cloud, const NeighborGraph& graph,
                                            double c, double alpha);

/// alpha-normalized Gaussian affinity exp(-|x - y|^2 / eps^2) truncated at 4 eps,
/// normalized by the empirical density to the power alpha, then row-normalized.
SparseRowMatrix build_dm_matrix(const PointCloud& cloud, double eps, double alpha);

} // namespace bdlle
