#include "bdlle/error.hpp"
#include "bdlle/lle_core.hpp"
#include "bdlle/rng.hpp"

#include <doctest.h>

#include <Eigen/QR>

#include <cmath>

using namespace bdlle;

namespace {

Eigen::MatrixXd random_matrix(long r, long c, std::uint64_t seed)
{
    CounterRng rng(seed);
    Eigen::MatrixXd A(r, c);
    for (long i = 0; i < r; ++i)
        for (long j = 0; j < c; ++j) A(i, j) = rng.normal();
    return A;
}

double row_sum_residual(const SparseRowMatrix& W)
{
    return (W * Eigen::VectorXd::Ones(W.cols()) - Eigen::VectorXd::Ones(W.rows())).cwiseAbs().maxCoeff();
}

} // namespace

TEST_CASE("symmetric pair of neighbors gets equal weights")
{
    Eigen::MatrixXd G(2, 2);
    G << 0.3, -0.3, 0.2, 0.2;
    for (SolvePath path : {SolvePath::direct, SolvePath::eigen_route}) {
        const BarycentricSolution s = solve_barycentric(G, 1e-3, path);
        CHECK(s.y(0) == doctest::Approx(s.y(1)).epsilon(1e-12));
        CHECK(s.w(0) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(s.w(1) == doctest::Approx(0.5).epsilon(1e-12));
    }
}

TEST_CASE("G = 0 gives y = 1/c")
{
    const Eigen::MatrixXd G = Eigen::MatrixXd::Zero(3, 4);
    for (SolvePath path : {SolvePath::direct, SolvePath::eigen_route}) {
        const BarycentricSolution s = solve_barycentric(G, 0.01, path);
        CHECK((s.y.array() - 100.0).abs().maxCoeff() < 1e-10);
        CHECK((s.w.array() - 0.25).abs().maxCoeff() < 1e-14);
    }
    CHECK(augmented_vector_discrete(G, 0.01).norm() == 0.0);
}

TEST_CASE("both solve paths agree and satisfy the normal equations")
{
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const long p = 2 + static_cast<long>(seed % 3);
        const long N = 3 + static_cast<long>(seed % 9);
        const Eigen::MatrixXd G = random_matrix(p, N, seed);
        const double c = seed % 2 ? 1e-3 : 0.5;
        const BarycentricSolution a = solve_barycentric(G, c, SolvePath::direct);
        const BarycentricSolution b = solve_barycentric(G, c, SolvePath::eigen_route);
        CHECK((a.y - b.y).norm() <= 1e-8 * a.y.norm());
        Eigen::MatrixXd A = G.transpose() * G;
        A.diagonal().array() += c;
        const Eigen::VectorXd one = Eigen::VectorXd::Ones(N);
        CHECK((A * b.y - one).norm() <= 1e-10 * one.norm());
        CHECK((A * a.y - one).norm() <= 1e-10 * one.norm());
        CHECK(std::abs(b.w.sum() - 1.0) <= 1e-12);
    }
}

TEST_CASE("rank-one augmented vector")
{
    Eigen::MatrixXd G(3, 1);
    G << 0.2, -0.1, 0.4;
    const double c = 0.05;
    const Eigen::VectorXd T = augmented_vector_discrete(G, c);
    const Eigen::VectorXd v = G.col(0);
    CHECK((T - v / (v.squaredNorm() + c)).norm() <= 1e-14);
}

TEST_CASE("parameter errors")
{
    const Eigen::MatrixXd G = Eigen::MatrixXd::Ones(2, 2);
    CHECK_THROWS_AS(solve_barycentric(G, 0.0), ParameterError);
    CHECK_THROWS_AS(solve_barycentric(Eigen::MatrixXd(2, 0), 1.0), EmptyNeighborhoodError);

    Eigen::MatrixXd X(3, 1);
    X << 0.0, 1.0, 5.0;
    const PointCloud c = make_cloud(X, 1);
    const NeighborGraph g = build_graph(c, EpsilonBall{2.0});
    try {
        build_lle_matrix(c, g, FixedRegularizer{1e-3});
        FAIL("expected an isolated-point error");
    } catch (const EmptyNeighborhoodError& e) {
        CHECK(e.indices() == std::vector<long>{2});
    }
    const NeighborGraph k = build_graph(c, Knn{1});
    CHECK_THROWS_AS(build_lle_matrix(c, k, PaperRegularizer{}), ParameterError);
    CHECK_NOTHROW(build_lle_matrix(c, k, PaperRegularizer{0.5}));
}

TEST_CASE("circle grid rows are [1/2, 1/2]")
{
    const PointCloud c = circle_grid(20);
    const NeighborGraph g = build_graph(c, Knn{2});
    const LleMatrix W = build_lle_matrix(c, g, FixedRegularizer{1e-3});
    for (long k = 0; k < 20; ++k) {
        CHECK(W.W.row(k).nonZeros() == 2);
        for (SparseRowMatrix::InnerIterator it(W.W, k); it; ++it) {
            CHECK(it.value() == doctest::Approx(0.5).epsilon(1e-12));
        }
    }
}

TEST_CASE("default regularizer and row sums on sampled clouds")
{
    const PointCloud c = sample_disk(3000, 2);
    const NeighborGraph g = build_graph(c, EpsilonBall{0.15});
    const LleMatrix W = build_lle_matrix(c, g, PaperRegularizer{});
    CHECK(W.meta.c == doctest::Approx(c.size() * std::pow(0.15, 5)));
    CHECK(row_sum_residual(W.W) <= 1e-12);
    for (long k = 0; k < c.size(); ++k) {
        // Sparsity pattern equals the neighbor list.
        std::vector<long> cols;
        for (SparseRowMatrix::InnerIterator it(W.W, k); it; ++it) cols.push_back(it.col());
        std::vector<long> nb = g.neighbors[k];
        std::sort(nb.begin(), nb.end());
        CHECK(cols == nb);
    }
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(c.size());
    CHECK(apply_shifted(W, ones).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK_THROWS_AS(apply_shifted(W, Eigen::VectorXd::Ones(3)), DimensionError);
}

TEST_CASE("weights are invariant under rigid motions")
{
    const PointCloud c = sample_curve_m3(400, 5);
    const NeighborGraph g = build_graph(c, EpsilonBall{0.06});
    const LleMatrix W = build_lle_matrix(c, g, FixedRegularizer{1e-4});
    CounterRng rng(77);
    Eigen::Matrix3d A;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) A(i, j) = rng.normal();
    const Eigen::Matrix3d R = Eigen::HouseholderQR<Eigen::Matrix3d>(A).householderQ();
    Eigen::MatrixXd X = c.points * R.transpose();
    X.rowwise() += Eigen::RowVector3d(1.0, 2.0, -3.0);
    PointCloud moved = c;
    moved.points = X;
    const LleMatrix Wm = build_lle_matrix(moved, g, FixedRegularizer{1e-4});
    CHECK((Eigen::MatrixXd(W.W) - Eigen::MatrixXd(Wm.W)).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("linear functions are reproduced when the neighbors span the offset")
{
    Eigen::MatrixXd X(2, 1);
    X << 0.0, 0.4;
    const PointCloud c = make_cloud(X, 1);
    const NeighborGraph g = build_graph(c, Knn{1});
    const LleMatrix W = build_lle_matrix(c, g, FixedRegularizer{1e-3});
    // One neighbor: w = [1], so (W - I) f = f(neighbor) - f(x).
    Eigen::VectorXd f(2);
    f << 1.0, 1.0 + 3.0 * 0.4;
    const Eigen::VectorXd r = apply_shifted(W, f);
    CHECK(r(0) == doctest::Approx(1.2));
    CHECK(r(1) == doctest::Approx(-1.2));
}

TEST_CASE("alpha kernel family")
{
    const PointCloud c = sample_disk(1500, 8);
    const NeighborGraph g = build_graph(c, EpsilonBall{0.2});
    const double cval = c.size() * std::pow(0.2, 5);
    const LleMatrix W = build_lle_matrix(c, g, FixedRegularizer{cval});

    const AlphaKernelMatrix half = build_alpha_kernel_matrix(c, g, cval, 0.5);
    CHECK(half.degenerate_rows.empty());
    CHECK((Eigen::MatrixXd(half.W) - Eigen::MatrixXd(W.W)).cwiseAbs().maxCoeff() <= 1e-10);

    const AlphaKernelMatrix one = build_alpha_kernel_matrix(c, g, cval, 1.0);
    for (long k = 0; k < c.size(); ++k) {
        for (SparseRowMatrix::InnerIterator it(one.W, k); it; ++it) {
            CHECK(it.value() == doctest::Approx(1.0 / g.degree(k)));
        }
    }

    const PointCloud circle = circle_grid(16);
    const NeighborGraph cg = build_graph(circle, Knn{2});
    const AlphaKernelMatrix zero = build_alpha_kernel_matrix(circle, cg, 1e-3, 0.0);
    CHECK(zero.degenerate_rows.empty());
    const Eigen::MatrixXd Z(zero.W);
    CHECK(Z.allFinite());
    CHECK((Z.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);
    CHECK_THROWS_AS(build_alpha_kernel_matrix(circle, cg, 1e-3, 1.5), ParameterError);
}

TEST_CASE("diffusion-map matrix")
{
    Eigen::MatrixXd X(2, 1);
    X << 0.3, 0.3;
    const SparseRowMatrix D = build_dm_matrix(make_cloud(X, 1), 0.1, 0.5);
    const Eigen::MatrixXd Dd(D);
    CHECK((Dd.array() - 0.5).abs().maxCoeff() <= 1e-15);

    const PointCloud c = sample_interval(300, 4);
    const SparseRowMatrix P0 = build_dm_matrix(c, 0.05, 0.0);
    CHECK(row_sum_residual(P0) <= 1e-12);
    // alpha = 0: plain row-normalized Gaussian kernel.
    const long k = 17;
    double total = 0.0;
    for (long j = 0; j < c.size(); ++j) {
        const double d = std::abs(c.points(j, 0) - c.points(k, 0));
        if (d < 0.2 || j == k) total += std::exp(-d * d / 0.0025);
    }
    for (SparseRowMatrix::InnerIterator it(P0, k); it; ++it) {
        const double d = std::abs(c.points(it.col(), 0) - c.points(k, 0));
        CHECK(it.value() == doctest::Approx(std::exp(-d * d / 0.0025) / total).epsilon(1e-12));
    }
    CHECK(row_sum_residual(build_dm_matrix(c, 0.05, 1.0)) <= 1e-12);
}
