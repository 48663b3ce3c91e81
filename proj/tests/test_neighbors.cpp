#include "bdlle/error.hpp"
#include "bdlle/neighbors.hpp"
#include "bdlle/rng.hpp"

#include <doctest.h>

#include <Eigen/QR>

using namespace bdlle;

namespace {

Eigen::MatrixXd collinear()
{
    Eigen::MatrixXd X(3, 1);
    X << 0.0, 1.0, 2.0;
    return X;
}

void check_same(const NeighborGraph& a, const NeighborGraph& b)
{
    REQUIRE(a.size() == b.size());
    for (long k = 0; k < a.size(); ++k) {
        CHECK(a.neighbors[k] == b.neighbors[k]);
        CHECK(a.distances[k] == b.distances[k]);
    }
}

Eigen::MatrixXd random_rotation(int p, std::uint64_t seed)
{
    CounterRng rng(seed);
    Eigen::MatrixXd A(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) A(i, j) = rng.normal();
    return Eigen::HouseholderQR<Eigen::MatrixXd>(A).householderQ();
}

} // namespace

TEST_CASE("collinear points, eps-ball and KNN tie rule")
{
    const NeighborGraph g = build_graph(collinear(), EpsilonBall{1.5});
    CHECK(g.neighbors[0] == std::vector<long>{1});
    CHECK(g.neighbors[1] == std::vector<long>{0, 2});
    CHECK(g.neighbors[2] == std::vector<long>{1});

    const NeighborGraph k = build_graph(collinear(), Knn{1});
    CHECK(k.neighbors[0] == std::vector<long>{1});
    CHECK(k.neighbors[1] == std::vector<long>{0});
    CHECK(k.neighbors[2] == std::vector<long>{1});
}

TEST_CASE("eps-ball membership is strict")
{
    const NeighborGraph g = build_graph(collinear(), EpsilonBall{1.0});
    for (long k = 0; k < 3; ++k) CHECK(g.neighbors[k].empty());
    CHECK(g.isolated_points() == std::vector<long>{0, 1, 2});
}

TEST_CASE("parameter errors")
{
    CHECK_THROWS_AS(build_graph(collinear(), Knn{3}), ParameterError);
    CHECK_THROWS_AS(build_graph(collinear(), Knn{0}), ParameterError);
    CHECK_THROWS_AS(build_graph(collinear(), EpsilonBall{0.0}), ParameterError);
    const NeighborGraph g = build_graph(collinear(), EpsilonBall{0.5});
    CHECK_THROWS_AS(local_data_matrix(collinear(), g, 0), EmptyNeighborhoodError);
}

TEST_CASE("grid search equals brute force")
{
    const PointCloud disk = sample_disk(640, 17); // ~500 retained
    check_same(build_graph(disk, EpsilonBall{0.1}), build_graph_brute_force(disk.points, EpsilonBall{0.1}));
    check_same(build_graph(disk, Knn{12}), build_graph_brute_force(disk.points, Knn{12}));

    const PointCloud curve = sample_curve_m3(700, 4);
    check_same(build_graph(curve, EpsilonBall{0.03}), build_graph_brute_force(curve.points, EpsilonBall{0.03}));
    check_same(build_graph(curve, Knn{7}), build_graph_brute_force(curve.points, Knn{7}));

    const PointCloud gauss = sample_gaussian_null(300, 20, 2);
    check_same(build_graph(gauss, Knn{25}), build_graph_brute_force(gauss.points, Knn{25}));
    check_same(build_graph(gauss, EpsilonBall{5.0}), build_graph_brute_force(gauss.points, EpsilonBall{5.0}));

    const PointCloud torus = sample_truncated_torus(800, 6);
    check_same(build_graph(torus, EpsilonBall{0.5}), build_graph_brute_force(torus.points, EpsilonBall{0.5}));
}

TEST_CASE("eps-ball invariant holds pairwise")
{
    const PointCloud c = sample_disk(400, 3);
    const double eps = 0.15;
    const NeighborGraph g = build_graph(c, EpsilonBall{eps});
    for (long k = 0; k < c.size(); ++k) {
        std::vector<bool> listed(c.size(), false);
        for (long j : g.neighbors[k]) listed[j] = true;
        for (long j = 0; j < c.size(); ++j) {
            if (j == k) { CHECK_FALSE(listed[j]); continue; }
            const double d = (c.points.row(j) - c.points.row(k)).norm();
            CHECK(listed[j] == (d < eps));
        }
    }
}

TEST_CASE("local data matrix")
{
    Eigen::MatrixXd X(3, 2);
    const double a = 0.3, b = 0.2;
    X << 0.0, 0.0, a, b, -a, b;
    const NeighborGraph g = build_graph(X, Knn{2});
    const Eigen::MatrixXd G = local_data_matrix(X, g, 0);
    REQUIRE(G.cols() == 2);
    // Equal distances: tie broken by index, so (a,b) first.
    CHECK(G(0, 0) == a);
    CHECK(G(1, 0) == b);
    CHECK(G(0, 1) == -a);
    CHECK(G(1, 1) == b);

    Eigen::MatrixXd Y(2, 2);
    Y << 0.5, 0.5, 1.5, 0.5;
    const Eigen::MatrixXd H = local_data_matrix(Y, build_graph(Y, Knn{1}), 0);
    CHECK(H(0, 0) == 1.0);
    CHECK(H(1, 0) == 0.0);
}

TEST_CASE("translation and rotation invariance of G and G^T G")
{
    const PointCloud c = sample_curve_m3(300, 9);
    const NeighborGraph g = build_graph(c, EpsilonBall{0.05});
    const Eigen::RowVector3d shift(3.0, -2.0, 0.5);
    const Eigen::MatrixXd R = random_rotation(3, 21);
    Eigen::MatrixXd Xt = c.points;
    Xt.rowwise() += shift;
    const Eigen::MatrixXd Xr = c.points * R.transpose();
    for (long k = 0; k < c.size(); k += 7) {
        if (g.degree(k) == 0) continue;
        const Eigen::MatrixXd G = local_data_matrix(c, g, k);
        const Eigen::MatrixXd Gt = local_data_matrix(Xt, g, k);
        CHECK((G - Gt).cwiseAbs().maxCoeff() <= 1e-12);
        const Eigen::MatrixXd Gr = local_data_matrix(Xr, g, k);
        CHECK((G.transpose() * G - Gr.transpose() * Gr).cwiseAbs().maxCoeff() <= 1e-10);
    }
}
