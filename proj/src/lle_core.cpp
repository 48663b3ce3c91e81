#include "bdlle/lle_core.hpp"

#include "bdlle/error.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace bdlle {

namespace {

void check_solve_args(const Eigen::MatrixXd& G, double c)
{
    if (!(c > 0.0)) {
        throw ParameterError("regularizer c must be positive");
    }
    if (G.cols() == 0) {
        throw EmptyNeighborhoodError("empty neighborhood (N = 0)", {});
    }
}

std::string list_indices(const std::vector<long>& idx)
{
    std::string s;
    for (size_t i = 0; i < idx.size() && i < 20; ++i) {
        s += (i ? ", " : "") + std::to_string(idx[i]);
    }
    if (idx.size() > 20) {
        s += ", ...";
    }
    return s;
}

} // namespace

Eigen::VectorXd augmented_vector_discrete(const Eigen::MatrixXd& G, double c)
{
    check_solve_args(G, c);
    const Eigen::MatrixXd C = G * G.transpose();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
    const Eigen::VectorXd& lambda = es.eigenvalues();
    const double lambda_max = lambda.maxCoeff();
    const double cutoff = static_cast<double>(std::max(G.rows(), G.cols())) *
                          std::numeric_limits<double>::epsilon() * lambda_max;
    const Eigen::VectorXd projected = es.eigenvectors().transpose() * (G.rowwise().sum());
    Eigen::VectorXd scaled = Eigen::VectorXd::Zero(lambda.size());
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        if (lambda(i) > cutoff && lambda_max > 0.0) {
            scaled(i) = projected(i) / (lambda(i) + c);
        }
    }
    return es.eigenvectors() * scaled;
}

BarycentricSolution solve_barycentric(const Eigen::MatrixXd& G, double c, SolvePath path)
{
    check_solve_args(G, c);
    const long n = G.cols();
    if (path == SolvePath::automatic) {
        path = n > G.rows() ? SolvePath::eigen_route : SolvePath::direct;
    }
    BarycentricSolution sol;
    sol.c = c;
    if (path == SolvePath::direct) {
        Eigen::MatrixXd A = G.transpose() * G;
        A.diagonal().array() += c;
        sol.y = A.llt().solve(Eigen::VectorXd::Ones(n));
    } else {
        const Eigen::VectorXd T = augmented_vector_discrete(G, c);
        sol.y = (Eigen::VectorXd::Ones(n) - G.transpose() * T) / c;
    }
    sol.y_sum = sol.y.sum();
    sol.w = sol.y / sol.y_sum;
    return sol;
}

double resolve_regularizer(const RegularizerRule& rule, const NeighborGraph& graph, long n, int d)
{
    if (const auto* fixed = std::get_if<FixedRegularizer>(&rule)) {
        if (!(fixed->c > 0.0)) {
            throw ParameterError("regularizer c must be positive");
        }
        return fixed->c;
    }
    const auto& paper = std::get<PaperRegularizer>(rule);
    double eps = 0.0;
    if (paper.eps) {
        eps = *paper.eps;
    } else if (const auto* ball = std::get_if<EpsilonBall>(&graph.scheme)) {
        eps = ball->eps;
    } else {
        throw ParameterError("c = n eps^(d+3) needs eps; supply it explicitly for a KNN graph");
    }
    if (!(eps > 0.0)) {
        throw ParameterError("c = n eps^(d+3) needs eps > 0");
    }
    return static_cast<double>(n) * std::pow(eps, d + 3);
}

LleMatrix build_lle_matrix(const PointCloud& cloud, const NeighborGraph& graph,
                           const RegularizerRule& rule)
{
    const long n = cloud.size();
    if (graph.size() != n) {
        throw DimensionError("build_lle_matrix: graph and cloud sizes differ");
    }
    if (const auto isolated = graph.isolated_points(); !isolated.empty()) {
        throw EmptyNeighborhoodError("build_lle_matrix: isolated points " + list_indices(isolated),
                                     isolated);
    }
    const double c = resolve_regularizer(rule, graph, n, cloud.intrinsic_dim);

    LleMatrix out;
    out.y.resize(static_cast<size_t>(n));
    out.y_sum.resize(static_cast<size_t>(n));
    out.degree.resize(static_cast<size_t>(n));

#pragma omp parallel for schedule(dynamic, 64)
    for (long k = 0; k < n; ++k) {
        const Eigen::MatrixXd G = local_data_matrix(cloud, graph, k);
        auto sol = solve_barycentric(G, c);
        out.y_sum[static_cast<size_t>(k)] = sol.y_sum;
        out.degree[static_cast<size_t>(k)] = G.cols();
        out.y[static_cast<size_t>(k)] = std::move(sol.y);
    }

    std::vector<Eigen::Triplet<double, long>> trips;
    size_t nnz = 0;
    for (const auto& nb : graph.neighbors) {
        nnz += nb.size();
    }
    trips.reserve(nnz);
    for (long k = 0; k < n; ++k) {
        const auto& nb = graph.neighbors[static_cast<size_t>(k)];
        const auto& y = out.y[static_cast<size_t>(k)];
        const double s = out.y_sum[static_cast<size_t>(k)];
        for (size_t j = 0; j < nb.size(); ++j) {
            trips.emplace_back(k, nb[j], y(static_cast<long>(j)) / s);
        }
    }
    out.W.resize(n, n);
    out.W.setFromTriplets(trips.begin(), trips.end());
    out.W.makeCompressed();

    out.meta.scheme = graph.scheme;
    if (const auto* ball = std::get_if<EpsilonBall>(&graph.scheme)) {
        out.meta.eps = ball->eps;
    } else {
        out.meta.k = std::get<Knn>(graph.scheme).k;
        if (const auto* paper = std::get_if<PaperRegularizer>(&rule); paper && paper->eps) {
            out.meta.eps = paper->eps;
        }
    }
    out.meta.c = c;
    out.meta.d = cloud.intrinsic_dim;
    out.meta.seed = cloud.seed;
    return out;
}

Eigen::VectorXd apply_shifted(const SparseRowMatrix& W, const Eigen::VectorXd& f)
{
    if (W.cols() != f.size() || W.rows() != W.cols()) {
        throw DimensionError("apply_shifted: dimension mismatch");
    }
    return W * f - f;
}

Eigen::VectorXd apply_shifted(const LleMatrix& W, const Eigen::VectorXd& f)
{
    return apply_shifted(W.W, f);
}

AlphaKernelMatrix build_alpha_kernel_matrix(const PointCloud& cloud, const NeighborGraph& graph,
                                            double c, double alpha)
{
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw ParameterError("alpha must lie in [0, 1]");
    }
    if (!(c > 0.0)) {
        throw ParameterError("regularizer c must be positive");
    }
    const long n = cloud.size();
    if (const auto isolated = graph.isolated_points(); !isolated.empty()) {
        throw EmptyNeighborhoodError("alpha kernel: isolated points " + list_indices(isolated),
                                     isolated);
    }
    std::vector<Eigen::VectorXd> rows(static_cast<size_t>(n));
    std::vector<char> degenerate(static_cast<size_t>(n), 0);

#pragma omp parallel for schedule(dynamic, 64)
    for (long k = 0; k < n; ++k) {
        const Eigen::MatrixXd G = local_data_matrix(cloud, graph, k);
        const Eigen::VectorXd T = augmented_vector_discrete(G, c);
        Eigen::VectorXd row = alpha * Eigen::VectorXd::Ones(G.cols()) -
                              (1.0 - alpha) * (G.transpose() * T);
        const double sum = row.sum();
        const double scale = row.cwiseAbs().maxCoeff();
        if (std::abs(sum) <= 1e-14 * static_cast<double>(G.cols()) * scale || scale == 0.0) {
            degenerate[static_cast<size_t>(k)] = 1;
        } else {
            row /= sum;
        }
        rows[static_cast<size_t>(k)] = std::move(row);
    }

    AlphaKernelMatrix out;
    std::vector<Eigen::Triplet<double, long>> trips;
    for (long k = 0; k < n; ++k) {
        const auto& nb = graph.neighbors[static_cast<size_t>(k)];
        for (size_t j = 0; j < nb.size(); ++j) {
            trips.emplace_back(k, nb[j], rows[static_cast<size_t>(k)](static_cast<long>(j)));
        }
        if (degenerate[static_cast<size_t>(k)]) {
            out.degenerate_rows.push_back(k);
        }
    }
    out.W.resize(n, n);
    out.W.setFromTriplets(trips.begin(), trips.end());
    out.W.makeCompressed();
    return out;
}

SparseRowMatrix build_dm_matrix(const PointCloud& cloud, double eps, double alpha)
{
    if (!(eps > 0.0)) {
        throw ParameterError("build_dm_matrix: eps must be positive");
    }
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw ParameterError("build_dm_matrix: alpha must lie in [0, 1]");
    }
    const long n = cloud.size();
    const NeighborGraph support = build_graph(cloud.points, EpsilonBall{4.0 * eps});

    // Affinity including the diagonal H(x, x) = 1.
    std::vector<std::vector<double>> h(static_cast<size_t>(n));
    Eigen::VectorXd density(n);
    for (long k = 0; k < n; ++k) {
        const auto& ds = support.distances[static_cast<size_t>(k)];
        auto& row = h[static_cast<size_t>(k)];
        row.reserve(ds.size());
        double sum = 1.0;
        for (double d : ds) {
            row.push_back(std::exp(-(d * d) / (eps * eps)));
            sum += row.back();
        }
        density(k) = sum / static_cast<double>(n);
    }
    const Eigen::VectorXd scale = density.array().pow(-alpha);

    std::vector<Eigen::Triplet<double, long>> trips;
    for (long k = 0; k < n; ++k) {
        const auto& nb = support.neighbors[static_cast<size_t>(k)];
        const auto& row = h[static_cast<size_t>(k)];
        double total = scale(k) * scale(k);
        for (size_t j = 0; j < nb.size(); ++j) {
            total += row[j] * scale(k) * scale(nb[j]);
        }
        trips.emplace_back(k, k, scale(k) * scale(k) / total);
        for (size_t j = 0; j < nb.size(); ++j) {
            trips.emplace_back(k, nb[j], row[j] * scale(k) * scale(nb[j]) / total);
        }
    }
    SparseRowMatrix W(n, n);
    W.setFromTriplets(trips.begin(), trips.end());
    W.makeCompressed();
    return W;
}

} // namespace bdlle
