#include "bdlle/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace bdlle::quad;

TEST_CASE("Gauss-Legendre integrates polynomials of degree 2n-1 exactly")
{
    for (int n : {1, 2, 5, 16, 48}) {
        const GaussRule r = gauss_legendre(n);
        REQUIRE(r.nodes.size() == static_cast<size_t>(n));
        for (int k = 0; k <= 2 * n - 1; ++k) {
            double q = 0.0;
            for (int i = 0; i < n; ++i) q += r.weights[i] * std::pow(r.nodes[i], k);
            const double exact = k % 2 ? 0.0 : 2.0 / (k + 1);
            CHECK(q == doctest::Approx(exact).epsilon(1e-13));
        }
    }
}

TEST_CASE("adaptive Simpson and Gauss-Kronrod agree with closed forms")
{
    auto f = [](double x) { return std::exp(-x) * std::sin(3 * x); };
    const double exact = (3.0 - std::exp(-2.0) * (std::sin(6.0) + 3.0 * std::cos(6.0))) / 10.0;
    CHECK(std::abs(adaptive_simpson(f, 0.0, 2.0, 1e-10) - exact) < 1e-9);
    CHECK(std::abs(gauss_kronrod(f, 0.0, 2.0, 1e-12) - exact) < 1e-12);
    // Endpoint square-root singularity in the derivative.
    auto g = [](double x) { return std::sqrt(1.0 - x * x); };
    CHECK(std::abs(gauss_kronrod(g, 0.0, 1.0, 1e-12) - std::numbers::pi / 4) < 1e-10);
}
