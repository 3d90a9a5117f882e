// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances are pinned in code next to each check.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "entropic/agreement.hpp"
#include "entropic/asymptotics.hpp"
#include "entropic/basisrisk.hpp"
#include "entropic/equilibrium.hpp"
#include "entropic/hedging.hpp"
#include "entropic/measures.hpp"
#include "entropic/pricing.hpp"
#include "entropic/quadrature.hpp"
#include "fixtures.hpp"
#include "oracle.hpp"

using namespace entropic;

namespace {

struct Checker {
    int failures = 0;
    int checks = 0;
    std::ostringstream detail;

    void expect(bool ok, const std::string& what) {
        ++checks;
        if (!ok) {
            ++failures;
            detail << "\n      FAILED: " << what;
        }
    }
    void expect_le(double value, double bound, const std::string& what) {
        std::ostringstream os;
        os << what << " (" << value << " > " << bound << ")";
        expect(value <= bound, os.str());
    }
};

double elapsed_s(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

AgentProfile agent(double gamma, Claim e) { return AgentProfile{gamma, std::move(e), ""}; }

// -------------------------------------------------------------------------
// 1. dual-primal agreement
// -------------------------------------------------------------------------
void criterion_dual_primal(Checker& c) {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(1001);
    std::uniform_real_distribution<double> gu(0.25, 4.0);
    for (const MarketTree& tree : {fixtures::t1(), fixtures::two_period()}) {
        for (int rep = 0; rep < 20; ++rep) {
            const double gamma = gu(rng);
            const Claim e = fixtures::random_claim(tree, rng, 2.0);
            const Claim b = fixtures::random_claim(tree, rng, 2.0);
            const double engine = writer_price_value(tree, gamma, e, b);
            const double grid = oracle::grid_dual_price(tree, gamma, e, b, 1e-4);
            c.expect_le(std::abs(engine - grid), 1e-5, "dual gap on a random fixture");
        }
    }
    c.expect_le(elapsed_s(t0), 30.0, "criterion 1 runtime [s]");
}

// -------------------------------------------------------------------------
// 2. indifference-price identity suite at 1e-9
// -------------------------------------------------------------------------
void criterion_identities(Checker& c) {
    const MarketTree t1 = fixtures::t1();
    std::mt19937_64 rng(1002);
    const double gamma = 1.2;
    const Claim zero = Claim::zeros(3);

    auto uw = [&](double g, const Claim& b) { return writer_price_value(t1, g, zero, b); };

    for (int rep = 0; rep < 10; ++rep) {
        const Claim e = fixtures::random_claim(t1, rng);
        const Claim b = fixtures::random_claim(t1, rng);
        const double base = writer_price_value(t1, gamma, e, b);

        c.expect_le(std::abs(writer_price_value(t1, gamma, e, b + 1.5) - (base + 1.5)), 1e-9,
                    "cash invariance");
        const Claim g = terminal_gains(t1, fixtures::random_strategy(t1, rng));
        c.expect_le(std::abs(writer_price_value(t1, gamma, e, b + g) - base), 1e-9,
                    "replication invariance");
        c.expect_le(std::abs(base - (uw(gamma, b - e) - uw(gamma, -1.0 * e))), 1e-9,
                    "conditional-to-unconditional decomposition");
        c.expect_le(std::abs(buyer_price_value(t1, gamma, e, b) +
                             writer_price_value(t1, gamma, e, -1.0 * b)),
                    1e-9, "buyer-writer duality");
        for (double alpha : {0.5, 2.0, 5.0})
            c.expect_le(std::abs(alpha * uw(alpha * gamma, b) - uw(gamma, alpha * b)), 1e-9,
                        "risk-aversion scaling");

        const Claim b2 = fixtures::random_claim(t1, rng);
        const double v1 = writer_price_value(t1, gamma, e, b);
        const double v2 = writer_price_value(t1, gamma, e, b2);
        for (double lam : {0.25, 0.5, 0.75}) {
            const double mid = writer_price_value(t1, gamma, e, lam * b + (1.0 - lam) * b2);
            c.expect(mid <= lam * v1 + (1.0 - lam) * v2 + 1e-9, "convexity");
        }
    }

    // subadditivity with both equality directions
    const double g1 = 0.8, g2 = 2.4;
    const double gt = 1.0 / (1.0 / g1 + 1.0 / g2);
    for (int rep = 0; rep < 10; ++rep) {
        const Claim b1 = fixtures::random_claim(t1, rng);
        const Claim b2 = fixtures::random_claim(t1, rng);
        const double lhs = uw(g1, b1) + uw(g2, b2);
        const double rhs = uw(gt, b1 + b2);
        c.expect(lhs >= rhs - 1e-10, "subadditivity direction");
        const bool equal = std::abs(lhs - rhs) <= 1e-9;
        const bool equivalent = risk_equivalent(t1, (g1 / gt) * b1, (g2 / gt) * b2);
        c.expect(equal == equivalent, "subadditivity equality characterization");
    }
    {
        const Claim b1 = fixtures::random_claim(t1, rng);
        TradingStrategy s = TradingStrategy::zeros(t1);
        s.positions[0](0) = 1.7;
        const Claim b2 = (g1 / g2) * b1 + (1.0 / g2) * terminal_gains(t1, s) - 0.3;
        c.expect_le(std::abs(uw(g1, b1) + uw(g2, b2) - uw(gt, b1 + b2)), 1e-9,
                    "subadditivity equality on a constructed pair");
    }

    // non-homogeneity margins
    const Claim ind = fixtures::up_indicator(t1);
    for (double alpha : {2.0, -1.0})
        c.expect(std::abs(uw(gamma, alpha * ind) - alpha * uw(gamma, ind)) > 1e-8,
                 "non-homogeneity margin");
}

// -------------------------------------------------------------------------
// 3. risk-aversion limits
// -------------------------------------------------------------------------
void criterion_gamma_limits(Checker& c) {
    for (const MarketTree& tree : {fixtures::t1(), fixtures::two_period()}) {
        std::mt19937_64 rng(1003);
        const Claim zero = Claim::zeros(tree.num_leaves());
        const auto q0 = minimal_entropy_measure(tree, zero).measure;
        for (int rep = 0; rep < 5; ++rep) {
            const Claim e = fixtures::random_claim(tree, rng, 2.0);
            const Claim b = fixtures::random_claim(tree, rng, 2.0);
            c.expect_le(std::abs(writer_price_value(tree, 1e-5, e, b) - q0.expectation(b)),
                        1e-3, "small-gamma limit");
            const auto [lo_be, hi_be] = price_bounds(tree, b - e);
            const auto [lo_e, hi_e] = price_bounds(tree, e);
            c.expect_le(std::abs(writer_price_value(tree, 1e4, e, b) - (hi_be + lo_e)), 1e-3,
                        "large-gamma superhedging limit");
        }
    }
}

// -------------------------------------------------------------------------
// 4. agreement theorems
// -------------------------------------------------------------------------
void criterion_agreement(Checker& c) {
    const MarketTree t1 = fixtures::t1();
    std::mt19937_64 rng(1004);
    std::uniform_real_distribution<double> gu(0.3, 3.0);

    // replicable endowments: no agreement on non-replicable claims
    for (int rep = 0; rep < 20; ++rep) {
        TradingStrategy s1 = fixtures::random_strategy(t1, rng);
        TradingStrategy s2 = fixtures::random_strategy(t1, rng);
        const auto a1 = agent(gu(rng), terminal_gains(t1, s1) + 0.5);
        const auto a2 = agent(gu(rng), terminal_gains(t1, s2) - 1.0);
        Claim b = fixtures::random_claim(t1, rng, 2.0);
        if (replicate(t1, b)) b = b + fixtures::up_indicator(t1);
        const double w1 = writer_price_value(t1, a1.gamma, a1.endowment, b);
        const double b2 = buyer_price_value(t1, a2.gamma, a2.endowment, b);
        c.expect(w1 - b2 > 1e-10, "non-agreement with replicable endowments");
    }

    // replicable transfer <=> proportional endowments <=> zero score, both ways
    {
        const Claim e1 = fixtures::random_claim(t1, rng, 2.0);
        const auto p1 = agent(1.0, e1);
        const auto p2 = agent(2.0, 0.5 * e1 + 0.9);
        const auto [sigma, bstar] = max_excess_score(t1, p1, p2);
        c.expect(std::abs(sigma) <= 1e-9, "zero score for proportional endowments");
        c.expect(replicate(t1, bstar).has_value(), "replicable transfer (positive instance)");

        const auto n1 = agent(1.0, fixtures::random_claim(t1, rng, 2.0));
        const auto n2 = agent(2.0, fixtures::random_claim(t1, rng, 2.0));
        const auto [sigma_n, bstar_n] = max_excess_score(t1, n1, n2);
        c.expect(sigma_n > 1e-8, "positive score for generic endowments");
        c.expect(!replicate(t1, bstar_n).has_value(),
                 "non-replicable transfer (negative instance)");
    }

    // the optimal transfer dominates 50 random feasible allocations
    {
        const auto a1 = agent(1.1, fixtures::random_claim(t1, rng, 2.0));
        const auto a2 = agent(0.7, fixtures::random_claim(t1, rng, 2.0));
        const Claim aggregate = a1.endowment + a2.endowment;
        const Claim bstar = optimal_claim(t1, a1, a2);
        const double best = score(t1, a1, a2, a1.endowment - bstar, a2.endowment + bstar);
        for (int rep = 0; rep < 50; ++rep) {
            const Claim b1 = fixtures::random_claim(t1, rng, 4.0);
            c.expect(score(t1, a1, a2, b1, aggregate - b1) <= best + 1e-9,
                     "score dominance over a random feasible allocation");
        }
    }
}

// -------------------------------------------------------------------------
// 5. asymptotics
// -------------------------------------------------------------------------
void criterion_asymptotics(Checker& c) {
    const MarketTree t1 = fixtures::t1();
    std::mt19937_64 rng(1005);
    const double gamma = 1.1;
    const Claim endow = fixtures::random_claim(t1, rng, 1.5);
    const std::vector<Claim> claims{fixtures::random_claim(t1, rng, 2.0),
                                    fixtures::random_claim(t1, rng, 2.0)};
    auto price = [&](const Eigen::VectorXd& a) {
        Claim bundle = a(0) * claims[0] + a(1) * claims[1];
        return writer_price_value(t1, gamma, endow, bundle);
    };

    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int rep = 0; rep < 5; ++rep) {
        Eigen::VectorXd a(2);
        a << u(rng), u(rng);
        const auto [fd_grad, fd_hess_coarse] = oracle::fd_derivatives(price, a, 1e-5);
        const Eigen::VectorXd grad = price_gradient(t1, gamma, endow, claims, a);
        c.expect_le((grad - fd_grad).lpNorm<Eigen::Infinity>(), 1e-6,
                    "gradient finite differences");
        const auto [fd_grad2, fd_hess] = oracle::fd_derivatives(price, a, 1e-3);
        const Eigen::MatrixXd hess = price_hessian(t1, gamma, endow, claims, a);
        c.expect_le((hess - fd_hess).lpNorm<Eigen::Infinity>(), 1e-4,
                    "hessian finite differences");
    }

    // expansion remainder slope
    {
        Eigen::VectorXd a(2);
        a << 1.0, -0.5;
        std::vector<double> errs;
        const std::vector<double> epses{0.1, 0.05, 0.025, 0.0125};
        for (double eps : epses) {
            Claim bundle = a(0) * claims[0] + a(1) * claims[1];
            const double exact = writer_price_value(t1, gamma, endow, eps * bundle);
            const double approx = expand_price(t1, gamma, endow, claims, a, eps);
            errs.push_back(std::abs(exact - approx));
        }
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (size_t i = 0; i < errs.size(); ++i) {
            const double x = std::log(epses[i]);
            const double y = std::log(std::max(errs[i], 1e-300));
            sx += x; sy += y; sxx += x * x; sxy += x * y;
        }
        const double n = static_cast<double>(errs.size());
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        c.expect(slope >= 2.5, "expansion remainder log-log slope");
    }

    // segment classification against exact prices at alpha = +-0.01
    const Claim ind = fixtures::up_indicator(t1);
    const std::vector<std::pair<AgentProfile, AgentProfile>> pairs{
        {agent(1.0, 2.0 * ind), agent(1.0, Claim::zeros(3))},
        {agent(1.0, Claim::zeros(3)), agent(1.0, 2.0 * ind)},
        {agent(0.7, fixtures::random_claim(t1, rng, 2.0)),
         agent(1.6, fixtures::random_claim(t1, rng, 2.0))},
        {agent(1.0, fixtures::random_claim(t1, rng, 2.0)),
         agent(1.3, fixtures::random_claim(t1, rng, 2.0))},
    };
    for (const auto& [a1, a2] : pairs) {
        const auto cls = small_trade_direction(t1, a1, a2, ind);
        auto strict_in = [&](double al) {
            return writer_price_value(t1, a1.gamma, a1.endowment, al * ind) <
                   buyer_price_value(t1, a2.gamma, a2.endowment, al * ind) - 1e-14;
        };
        if (cls.direction == TradeDirection::BuySegment)
            c.expect(strict_in(0.01) && !strict_in(-0.01), "buy segment matches exact prices");
        else if (cls.direction == TradeDirection::SellSegment)
            c.expect(strict_in(-0.01) && !strict_in(0.01), "sell segment matches exact prices");
        else
            c.expect(!strict_in(0.01) && !strict_in(-0.01), "no segment matches exact prices");
    }
}

// -------------------------------------------------------------------------
// 6. equilibrium
// -------------------------------------------------------------------------
void criterion_equilibrium(Checker& c) {
    const MarketTree t1 = fixtures::t1();
    std::mt19937_64 rng(1006);
    const Claim b = fixtures::up_indicator(t1);

    {
        const auto t0 = std::chrono::steady_clock::now();
        const auto a1 = agent(1.0, 2.0 * b);
        const auto a2 = agent(1.0, Claim::zeros(3));
        const auto r = solve_pepq(t1, a1, a2, {b});
        c.expect_le(r.clearing_residual, 1e-9, "clearing residual");
        c.expect(verify_clearing(r, t1, a1, a2, {b}), "independent clearing check");

        std::uniform_real_distribution<double> u(-2.0, 2.0);
        for (int rep = 0; rep < 5; ++rep) {
            Eigen::VectorXd start(1);
            start << u(rng);
            const auto again = solve_pepq(t1, a1, a2, {b}, 1e-10, start);
            c.expect_le(std::abs(again.quantity(0) - r.quantity(0)), 1e-8,
                        "uniqueness across starts");
        }

        const double grid = oracle::grid_equilibrium(t1, a1, a2, b, -3.0, 3.0, 1e-4);
        c.expect_le(std::abs(r.quantity(0) - grid), 2e-4, "grid equilibrium agreement");
        c.expect_le(elapsed_s(t0), 10.0, "criterion 6 scenario runtime [s]");
    }

    // zero-trade biconditional, both directions
    {
        const auto s1 = agent(1.0, Claim::zeros(3));
        const auto s2 = agent(1.7, Claim::zeros(3));
        const auto r0 = solve_pepq(t1, s1, s2, {b});
        c.expect_le(std::abs(r0.quantity(0)), 1e-9, "equal duals give zero trade");

        const auto a1 = agent(1.0, 2.0 * b);
        const auto a2 = agent(1.0, Claim::zeros(3));
        const auto r1 = solve_pepq(t1, a1, a2, {b});
        const Claim zero = Claim::zeros(3);
        const auto q1 = dual_optimizer(t1, a1.gamma, a1.endowment, zero);
        const auto q2 = dual_optimizer(t1, a2.gamma, a2.endowment, zero);
        c.expect(std::abs(r1.quantity(0)) > 1e-6, "nonzero trade");
        c.expect(std::abs(q1.expectation(b) - q2.expectation(b)) > 1e-6,
                 "nonzero trade implies unequal duals");
    }

    // independent claim: zero quantity at the plain expectation
    {
        const auto t0 = std::chrono::steady_clock::now();
        const MarketTree coin = fixtures::coin_tree();
        const Claim cb = fixtures::coin_claim(coin);
        const auto a1 = agent(1.0, fixtures::market_endowment(coin, 1.2, -0.4, 0.3));
        const auto a2 = agent(2.2, fixtures::market_endowment(coin, -0.7, 0.5, 0.1));
        const auto r = solve_pepq(coin, a1, a2, {cb});
        c.expect_le(std::abs(r.quantity(0)), 1e-9, "independent claim trades nothing");
        c.expect_le(std::abs(r.price(0) - 0.5), 1e-9, "independent claim prices at E[B]");
        c.expect_le(elapsed_s(t0), 10.0, "independent scenario runtime [s]");
    }
}

// -------------------------------------------------------------------------
// 7. residual risk
// -------------------------------------------------------------------------
void criterion_residual_risk(Checker& c) {
    const MarketTree t1 = fixtures::t1();
    std::mt19937_64 rng(1007);
    std::uniform_real_distribution<double> tu(0.02, 0.38);

    const Claim e1 = fixtures::random_claim(t1, rng, 2.0);
    const Claim e2 = fixtures::random_claim(t1, rng, 2.0);
    const Claim b = fixtures::random_claim(t1, rng, 3.0);
    const double g1 = 0.9, g2 = 1.8;

    const auto rw = residual_risk(t1, g1, e1, b, Side::Writer);
    const auto rb = residual_risk(t1, g2, e2, b, Side::Buyer);

    // leafwise decomposition
    const Claim rebuilt_w = rw.residual + terminal_gains(t1, rw.strategy) + rw.price;
    for (int i = 0; i < 3; ++i)
        c.expect_le(std::abs(rebuilt_w[i] - rw.claim[i]), 1e-9, "writer decomposition leaf");
    const Claim rebuilt_b = rb.residual + terminal_gains(t1, rb.strategy) + rb.price;
    for (int i = 0; i < 3; ++i)
        c.expect_le(std::abs(rebuilt_b[i] - rb.claim[i]), 1e-9, "buyer decomposition leaf");

    // measure-independent spread identity over 10 sampled measures
    const double spread =
        buyer_price_value(t1, g2, e2, b) - writer_price_value(t1, g1, e1, b);
    for (int rep = 0; rep < 10; ++rep) {
        const double t = tu(rng);
        std::vector<std::vector<double>> cond(4);
        cond[0] = {1.5 * t, 1.0 - 2.5 * t, t};
        const auto q = make_measure(t1, cond);
        const double sum = q.expectation(rw.residual) + q.expectation(rb.residual);
        c.expect_le(std::abs(sum - spread), 1e-9, "residual spread identity");
    }

    // zero conditional price of the residual
    for (int rep = 0; rep < 5; ++rep) {
        const Claim ee = fixtures::random_claim(t1, rng, 2.0);
        const Claim bb = fixtures::random_claim(t1, rng, 3.0);
        const auto d = residual_risk(t1, 1.2, ee, bb, Side::Writer);
        c.expect_le(std::abs(writer_price_value(t1, 1.2, ee, d.residual)), 1e-9,
                    "residual prices to zero");
    }
}

// -------------------------------------------------------------------------
// 8. basis risk
// -------------------------------------------------------------------------
void criterion_basisrisk(Checker& c) {
    BasisRiskModel m;
    m.mu = 0.05;
    m.sigma = 0.2;
    m.b = 0.0;
    m.a = 0.3;
    m.rho = 0.5;
    m.y0 = 0.0;
    m.horizon = 1.0;
    const auto [mean, var] = q0_law(m);
    const double sd = std::sqrt(var);

    // linear payoff closed form
    const double gamma = 1.4;
    const double cc = gamma * (1.0 - m.rho * m.rho);
    for (double slope : {1.0, -0.6, 2.3}) {
        const PayoffFn g({mean - 12.0, mean + 12.0},
                         {0.3 + slope * (mean - 12.0), 0.3 + slope * (mean + 12.0)});
        const double expected = 0.3 + slope * mean + cc * slope * slope * var / 2.0;
        c.expect_le(std::abs(closed_form_price(m, gamma, g) - expected), 1e-10,
                    "linear payoff identity");
    }

    // agreement boolean equals the conditional-price interval
    std::mt19937_64 rng(1008);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> gu(0.4, 2.0);
    auto random_payoff = [&]() {
        const double s = std::sqrt(2.0 * var);
        const double a0 = u(rng);
        const double b0 = 0.8 * u(rng);
        const std::vector<double> pts{-18.0, -12.0, -9.0, -7.0, 7.0, 9.0, 12.0, 18.0};
        std::vector<double> value(pts.size());
        value[3] = a0 + b0 * (mean - 7.0 * s);
        value[4] = a0 + b0 * (mean + 7.0 * s);
        for (int i = 2; i >= 0; --i)
            value[static_cast<size_t>(i)] =
                value[static_cast<size_t>(i) + 1] +
                u(rng) * 0.3 * s *
                    (pts[static_cast<size_t>(i) + 1] - pts[static_cast<size_t>(i)]);
        for (size_t i = 5; i < pts.size(); ++i)
            value[i] = value[i - 1] + u(rng) * 0.3 * s * (pts[i] - pts[i - 1]);
        std::vector<double> grid(pts.size());
        for (size_t i = 0; i < pts.size(); ++i) grid[i] = mean + pts[i] * s;
        return PayoffFn(grid, value);
    };
    auto negate = [](const PayoffFn& g) {
        return PayoffFn::combine(-1.0, g, 0.0, PayoffFn::constant(0.0));
    };
    int compared = 0;
    for (int rep = 0; rep < 20; ++rep) {
        const PayoffFn g = random_payoff();
        const PayoffFn pe1 = random_payoff();
        const PayoffFn pe2 = random_payoff();
        const BasisRiskAgent a1{gu(rng), pe1};
        const BasisRiskAgent a2{gu(rng), pe2};
        const double w1 = conditional_price(m, a1.gamma, pe1, g);
        const double b2 = -conditional_price(m, a2.gamma, pe2, negate(g));
        if (std::abs(b2 - w1) <= 1e-8) continue;
        ++compared;
        c.expect(agreement_check(m, a1, a2, g) == (w1 <= b2),
                 "agreement boolean vs interval");
    }
    c.expect(compared >= 15, "enough non-marginal agreement samples");

    // gamma-profile counterexample
    const PayoffFn x2({mean - 12.0, mean - 0.2 * sd, mean + 0.2 * sd, mean + 12.0},
                      {0.5, 0.5, 2.0, 2.0});
    const PayoffFn x1({mean - 12.0, mean + 2.2 * sd, mean + 2.6 * sd, mean + 3.2 * sd,
                       mean + 3.6 * sd, mean + 12.0},
                      {0.905, 0.905, 2.5, 2.5, 0.905, 0.905});
    std::vector<double> gammas;
    for (double g = 0.05; g <= 120.0; g *= 1.5) gammas.push_back(g);
    const auto profile = gamma_profile(m, x1, x2, gammas);
    c.expect(profile.f_zero < 0.0, "profile limit at zero is negative");
    c.expect(profile.f_inf > 0.0, "profile limit at infinity is positive");
    bool saw_down = false, saw_flip = false;
    for (size_t i = 0; i + 1 < profile.values.size(); ++i) {
        const double d = profile.values[i + 1].second - profile.values[i].second;
        if (d < 0.0) saw_down = true;
        if (saw_down && d > 0.0) saw_flip = true;
    }
    c.expect(saw_down && saw_flip, "discrete derivative changes sign");
}

// -------------------------------------------------------------------------
// 9. projected variance
// -------------------------------------------------------------------------
void criterion_projected_variance(Checker& c) {
    const MarketTree t1 = fixtures::t1();
    std::mt19937_64 rng(1009);
    const auto q0 = minimal_entropy_measure(t1, Claim::zeros(3)).measure;

    // KW residual second moment
    for (int rep = 0; rep < 5; ++rep) {
        const Claim b = fixtures::random_claim(t1, rng, 3.0);
        const auto kw = kw_decompose(t1, q0, b);
        double norm2 = 0.0;
        for (int i = 0; i < 3; ++i)
            norm2 += q0.leaf_probs[static_cast<size_t>(i)] * kw.orthogonal[i] *
                     kw.orthogonal[i];
        c.expect_le(std::abs(norm2 - projected_variance_scalar(t1, q0, b)), 1e-10,
                    "KW second moment equals the projected variance");
    }

    // quadratic-form identity
    const MarketTree two = fixtures::two_period();
    const auto q0two = minimal_entropy_measure(two, Claim::zeros(9)).measure;
    const std::vector<Claim> claims{fixtures::random_claim(two, rng, 2.0),
                                    fixtures::random_claim(two, rng, 2.0),
                                    fixtures::random_claim(two, rng, 2.0)};
    const auto proj = projected_variance(two, q0two, claims);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int rep = 0; rep < 10; ++rep) {
        const Eigen::Vector3d a(u(rng), u(rng), u(rng));
        const Claim combo = a(0) * claims[0] + a(1) * claims[1] + a(2) * claims[2];
        c.expect_le(std::abs(projected_variance_scalar(two, q0two, combo) -
                             a.dot(proj.matrix * a)),
                    1e-10, "bilinearity of the projected variance");
    }

    // replicable vector: zero matrix
    TradingStrategy s = TradingStrategy::zeros(t1);
    s.positions[0](0) = 1.9;
    const std::vector<Claim> reps{terminal_gains(t1, s) + 0.4, Claim::constant(3, -1.0)};
    c.expect_le(projected_variance(t1, q0, reps).matrix.lpNorm<Eigen::Infinity>(), 1e-12,
                "replicable vector projects to zero");
}

struct Criterion {
    const char* label;
    std::function<void(Checker&)> run;
};

} // namespace

int main() {
    const std::vector<Criterion> criteria{
        {"1. dual-primal agreement (engine vs grid dual, 1e-5)", criterion_dual_primal},
        {"2. indifference-price identity suite (1e-9)", criterion_identities},
        {"3. risk-aversion limits (1e-3)", criterion_gamma_limits},
        {"4. agreement theorems and score dominance", criterion_agreement},
        {"5. asymptotic expansions and segment tests", criterion_asymptotics},
        {"6. partial equilibrium (uniqueness, clearing, grid)", criterion_equilibrium},
        {"7. residual-risk decomposition and spread identity", criterion_residual_risk},
        {"8. basis-risk closed forms and gamma profile", criterion_basisrisk},
        {"9. projected variance vs Kunita-Watanabe", criterion_projected_variance},
    };

    int failed = 0;
    for (const auto& criterion : criteria) {
        Checker checker;
        std::string crash;
        try {
            criterion.run(checker);
        } catch (const std::exception& e) {
            crash = e.what();
        }
        const bool ok = crash.empty() && checker.failures == 0;
        if (!ok) ++failed;
        std::printf("[%s] %s (%d/%d checks)%s%s\n", ok ? "PASS" : "FAIL", criterion.label,
                    checker.checks - checker.failures, checker.checks,
                    crash.empty() ? "" : " exception: ", crash.c_str());
        if (!ok && checker.failures > 0) std::printf("%s\n", checker.detail.str().c_str());
    }
    return failed;
}
