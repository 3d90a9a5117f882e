#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "oracle.hpp"

using namespace entropic;

TEST_SUITE("oracle") {

TEST_CASE("dual grid is exact on the complete binomial") {
    const MarketTree b2 = fixtures::b2();
    const Claim b = fixtures::up_indicator(b2);
    // unique martingale measure q_up = 1/3; the dual collapses to E^Q[B]
    const double v = oracle::grid_dual_price(b2, 1.0, Claim::zeros(2), b, 1e-4);
    CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("dual grid value grows monotonically under refinement") {
    const MarketTree t1 = fixtures::t1();
    const Claim b = fixtures::up_indicator(t1);
    const double coarse = oracle::grid_dual_price(t1, 1.0, Claim::zeros(3), b, 1e-3);
    const double fine = oracle::grid_dual_price(t1, 1.0, Claim::zeros(3), b, 1e-4);
    // the shared base-point term refines too, so allow its second-order slack
    CHECK(fine >= coarse - 1e-9);
}

TEST_CASE("strategy grid on the binomial brackets the exact utility") {
    const MarketTree b2 = fixtures::b2();
    const Claim zero = Claim::zeros(2);
    // exact optimum of (1/2)(-e^{0.1 t}) + (1/2)(-e^{-0.2 t}) over t
    // stationarity: 0.1 e^{0.1 t} = 0.2 e^{-0.2 t} => t = ln(2)/0.3
    const double tstar = std::log(2.0) / 0.3;
    const double exact = 0.5 * -std::exp(0.1 * tstar) + 0.5 * -std::exp(-0.2 * tstar);
    const double grid = oracle::grid_strategy_utility(b2, 1.0, zero, zero, {-10.0, 10.0, 1e-4});
    CHECK(grid <= exact + 1e-15);
    CHECK(std::abs(grid - exact) <= 1e-7);

    const double coarse =
        oracle::grid_strategy_utility(b2, 1.0, zero, zero, {-10.0, 10.0, 1e-3});
    CHECK(coarse <= grid + 1e-15);
}

TEST_CASE("strategy grid caps the coordinate count") {
    const MarketTree two = fixtures::two_period();
    CHECK_THROWS_AS((void)oracle::grid_strategy_utility(two, 1.0, Claim::zeros(9),
                                                        Claim::zeros(9), {-1.0, 1.0, 0.1}),
                    Error);
}

TEST_CASE("finite differences are exact on quadratics and halve at order two") {
    auto quad = [](const Eigen::VectorXd& x) {
        return 1.5 * x(0) * x(0) - 0.7 * x(0) * x(1) + 0.2 * x(1) * x(1) + 3.0 * x(0) - x(1);
    };
    Eigen::VectorXd a(2);
    a << 0.3, -1.2;
    const auto [grad, hess] = oracle::fd_derivatives(quad, a, 1e-4);
    CHECK(grad(0) == doctest::Approx(3.0 * a(0) - 0.7 * a(1) + 3.0).epsilon(1e-10));
    CHECK(grad(1) == doctest::Approx(-0.7 * a(0) + 0.4 * a(1) - 1.0).epsilon(1e-10));
    CHECK(hess(0, 0) == doctest::Approx(3.0).epsilon(1e-7));
    CHECK(hess(0, 1) == doctest::Approx(-0.7).epsilon(1e-7));
    CHECK(hess(1, 1) == doctest::Approx(0.4).epsilon(1e-7));

    // quartic: halving h divides the gradient error by about four
    auto quart = [](const Eigen::VectorXd& x) { return std::pow(x(0), 4); };
    Eigen::VectorXd p(1);
    p << 1.3;
    const double exact = 4.0 * std::pow(1.3, 3);
    const auto [g1, h1] = oracle::fd_derivatives(quart, p, 1e-2);
    const auto [g2, h2] = oracle::fd_derivatives(quart, p, 5e-3);
    const double ratio = std::abs(g1(0) - exact) / std::abs(g2(0) - exact);
    CHECK(ratio == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("grid equilibrium finds zero on a symmetric fixture") {
    const MarketTree t1 = fixtures::t1();
    const Claim b = fixtures::up_indicator(t1);
    const AgentProfile a1{1.0, Claim::zeros(3), ""};
    const AgentProfile a2{1.0, Claim::zeros(3), ""};
    const double a = oracle::grid_equilibrium(t1, a1, a2, b, -3.0, 3.0, 1e-3);
    CHECK(std::abs(a) <= 1e-3);
}

TEST_CASE("grid equilibrium brackets shrink with the step") {
    const MarketTree t1 = fixtures::t1();
    const Claim b = fixtures::up_indicator(t1);
    const AgentProfile a1{1.0, 2.0 * b, ""};
    const AgentProfile a2{1.0, Claim::zeros(3), ""};
    const double coarse = oracle::grid_equilibrium(t1, a1, a2, b, -3.0, 3.0, 1e-2);
    const double fine = oracle::grid_equilibrium(t1, a1, a2, b, -3.0, 3.0, 1e-3);
    CHECK(std::abs(coarse - fine) <= 1e-2 + 1e-6);
}

} // TEST_SUITE
