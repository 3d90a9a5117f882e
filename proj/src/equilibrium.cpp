#include "entropic/equilibrium.hpp"

#include <cmath>

#include "entropic/hedging.hpp"
#include "entropic/pricing.hpp"

namespace entropic {

namespace {

constexpr int kMaxClaims = 4;
constexpr int kNewtonCap = 500;
constexpr double kUnboundedCutoff = 1e6;

Claim combine(const std::vector<Claim>& claims, const Eigen::VectorXd& a) {
    Claim total = Claim::zeros(claims.front().size());
    for (size_t i = 0; i < claims.size(); ++i)
        total = total + a(static_cast<Eigen::Index>(i)) * claims[i];
    return total;
}

void check_claims(const MarketTree& tree, const std::vector<Claim>& claims) {
    if (claims.empty() || claims.size() > static_cast<size_t>(kMaxClaims))
        raise(Errc::DimensionMismatch, "claim vector length must be between 1 and 4");
    for (const auto& c : claims) check_claim(tree, c, "equilibrium");
}

// Assumption behind existence/uniqueness: no nonzero combination of the
// bundle is replicable. Equivalent to the projected variance-covariance
// matrix under Q0 having no null direction; the offending direction, when
// found, is confirmed with the replication test before failing.
void check_no_replicable_combination(const MarketTree& tree, const std::vector<Claim>& claims) {
    const MartingaleMeasure q0 =
        minimal_entropy_measure(tree, Claim::zeros(tree.num_leaves())).measure;
    const Eigen::MatrixXd delta = projected_variance(tree, q0, claims).matrix;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(delta);
    const double lmin = eig.eigenvalues()(0);
    const double scale = std::max(1.0, eig.eigenvalues().maxCoeff());
    if (lmin <= 1e-10 * scale) {
        const Eigen::VectorXd dir = eig.eigenvectors().col(0);
        if (replicate(tree, combine(claims, dir), 1e-7)) {
            std::string s = "direction (";
            for (Eigen::Index i = 0; i < dir.size(); ++i)
                s += (i ? ", " : "") + std::to_string(dir(i));
            raise(Errc::ReplicableCombination, s + ") . B is replicable");
        }
    }
}

struct AgentSide {
    const AgentProfile* agent;
    double sign; // +1: price a.B as written by the agent, -1: as bought
};

// Dual measure entering the gradient for one side at holdings a.
MartingaleMeasure side_measure(const MarketTree& tree, const AgentSide& s,
                               const std::vector<Claim>& claims, const Eigen::VectorXd& a) {
    return dual_optimizer(tree, s.agent->gamma, s.agent->endowment,
                          combine(claims, Eigen::VectorXd(s.sign * a)));
}

} // namespace

ExcessObjective excess_objective(const MarketTree& tree, const AgentProfile& agent1,
                                 const AgentProfile& agent2, const std::vector<Claim>& claims,
                                 const Eigen::VectorXd& a) {
    check_claims(tree, claims);
    check_no_replicable_combination(tree, claims);
    if (a.size() != static_cast<Eigen::Index>(claims.size()))
        raise(Errc::DimensionMismatch, "holding vector does not match claim count");

    const Claim bundle = combine(claims, a);
    ExcessObjective f;
    f.value = writer_price_value(tree, agent1.gamma, agent1.endowment, bundle) -
              buyer_price_value(tree, agent2.gamma, agent2.endowment, bundle);

    const MartingaleMeasure q1 = side_measure(tree, {&agent1, +1.0}, claims, a);
    const MartingaleMeasure q2 = side_measure(tree, {&agent2, -1.0}, claims, a);
    f.gradient.resize(a.size());
    for (size_t i = 0; i < claims.size(); ++i)
        f.gradient(static_cast<Eigen::Index>(i)) =
            q1.expectation(claims[i]) - q2.expectation(claims[i]);
    f.hessian = agent1.gamma * projected_variance(tree, q1, claims).matrix +
                agent2.gamma * projected_variance(tree, q2, claims).matrix;
    return f;
}

EquilibriumResult solve_pepq(const MarketTree& tree, const AgentProfile& agent1,
                             const AgentProfile& agent2, const std::vector<Claim>& claims,
                             double tol, const std::optional<Eigen::VectorXd>& start) {
    check_claims(tree, claims);
    check_no_replicable_combination(tree, claims);
    const Eigen::Index n = static_cast<Eigen::Index>(claims.size());
    Eigen::VectorXd a = start ? *start : Eigen::VectorXd::Zero(n);
    if (a.size() != n) raise(Errc::DimensionMismatch, "start vector does not match claim count");

    // Damped Newton on the strictly convex f; the Hessian is PD under the
    // no-replicable-combination assumption.
    auto objective = [&](const Eigen::VectorXd& x, bool with_curvature) {
        const Claim bundle = combine(claims, x);
        ExcessObjective f;
        f.value = writer_price_value(tree, agent1.gamma, agent1.endowment, bundle) -
                  buyer_price_value(tree, agent2.gamma, agent2.endowment, bundle);
        if (with_curvature) {
            const MartingaleMeasure q1 = side_measure(tree, {&agent1, +1.0}, claims, x);
            const MartingaleMeasure q2 = side_measure(tree, {&agent2, -1.0}, claims, x);
            f.gradient.resize(n);
            for (size_t i = 0; i < claims.size(); ++i)
                f.gradient(static_cast<Eigen::Index>(i)) =
                    q1.expectation(claims[i]) - q2.expectation(claims[i]);
            f.hessian = agent1.gamma * projected_variance(tree, q1, claims).matrix +
                        agent2.gamma * projected_variance(tree, q2, claims).matrix;
        }
        return f;
    };

    EquilibriumResult r;
    ExcessObjective f = objective(a, true);
    int iter = 0;
    while (f.gradient.lpNorm<Eigen::Infinity>() > tol) {
        if (iter >= kNewtonCap)
            raise(Errc::NewtonDivergence, "equilibrium Newton exceeded iteration cap");
        ++iter;
        Eigen::VectorXd dir = f.hessian.ldlt().solve(-f.gradient);
        if (!dir.allFinite() || f.gradient.dot(dir) >= 0.0) dir = -f.gradient;
        const double cap = 10.0 * (1.0 + a.lpNorm<Eigen::Infinity>());
        if (dir.lpNorm<Eigen::Infinity>() > cap) dir *= cap / dir.lpNorm<Eigen::Infinity>();
        const double slope = f.gradient.dot(dir);

        // Full step first; near the optimum its value gain is below one ulp,
        // so a gradient-halving acceptance closes the endgame.
        ExcessObjective full = objective(a + dir, true);
        if (full.value <= f.value + 1e-4 * slope ||
            (full.gradient.lpNorm<Eigen::Infinity>() <=
                 0.5 * f.gradient.lpNorm<Eigen::Infinity>() &&
             full.value <= f.value + 1e-14 * (1.0 + std::abs(f.value)))) {
            a += dir;
            f = std::move(full);
            continue;
        }
        double step = 0.5;
        for (;;) {
            const ExcessObjective trial = objective(a + step * dir, false);
            if (trial.value <= f.value + 1e-4 * step * slope) break;
            step *= 0.5;
            if (step < 1e-18)
                raise(Errc::NewtonDivergence, "equilibrium line search stalled");
        }
        a += step * dir;
        f = objective(a, true);
    }
    r.quantity = a;
    r.iterations = iter;
    r.grad_norm = f.gradient.lpNorm<Eigen::Infinity>();
    const MartingaleMeasure q1 = side_measure(tree, {&agent1, +1.0}, claims, a);
    r.price.resize(n);
    for (size_t i = 0; i < claims.size(); ++i)
        r.price(static_cast<Eigen::Index>(i)) = q1.expectation(claims[i]);
    r.clearing_residual = r.grad_norm;
    return r;
}

DemandResult demand(const MarketTree& tree, const AgentProfile& agent,
                    const std::vector<Claim>& claims, const Eigen::VectorXd& p) {
    check_claims(tree, claims);
    check_no_replicable_combination(tree, claims);
    const Eigen::Index n = static_cast<Eigen::Index>(claims.size());
    if (p.size() != n) raise(Errc::DimensionMismatch, "price vector does not match claim count");

    // Maximize b(a) - a.p, i.e. minimize a.p - b(a); the gradient of -b at a
    // is p - E^{Q(-a)}[B] under the buyer-side stationarity convention.
    auto value = [&](const Eigen::VectorXd& x) {
        return x.dot(p) -
               buyer_price_value(tree, agent.gamma, agent.endowment, combine(claims, x));
    };

    DemandResult r;
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    double v = value(a);
    auto gradient_at = [&](const Eigen::VectorXd& x) {
        const MartingaleMeasure q = side_measure(tree, {&agent, -1.0}, claims, x);
        Eigen::VectorXd grad(n);
        for (size_t i = 0; i < claims.size(); ++i)
            grad(static_cast<Eigen::Index>(i)) =
                p(static_cast<Eigen::Index>(i)) - q.expectation(claims[i]);
        return std::make_pair(grad, q);
    };
    for (int iter = 0; iter < kNewtonCap; ++iter) {
        auto [grad, q] = gradient_at(a);
        if (grad.lpNorm<Eigen::Infinity>() <= 1e-10) {
            r.bounded = true;
            r.quantity = a;
            r.iterations = iter;
            return r;
        }
        const double cap = 10.0 * (1.0 + a.lpNorm<Eigen::Infinity>());
        Eigen::VectorXd dir;
        try {
            const Eigen::MatrixXd hess =
                agent.gamma * projected_variance(tree, q, claims).matrix;
            dir = hess.ldlt().solve(-grad);
            if (!dir.allFinite() || grad.dot(dir) >= 0.0) dir = -grad;
        } catch (const Error&) {
            // the shifted measure degenerated numerically: far outside the
            // stationarity region, so march along the gradient at full trust
            dir = -grad * (cap / grad.lpNorm<Eigen::Infinity>());
        }
        if (dir.lpNorm<Eigen::Infinity>() > cap) dir *= cap / dir.lpNorm<Eigen::Infinity>();
        const double slope = grad.dot(dir);

        const double vfull = value(a + dir);
        bool took_full = false;
        if (vfull <= v + 1e-4 * slope) {
            took_full = true;
        } else if (vfull <= v + 1e-14 * (1.0 + std::abs(v))) {
            const auto [gfull, qfull] = gradient_at(a + dir);
            took_full = gfull.lpNorm<Eigen::Infinity>() <=
                        0.5 * grad.lpNorm<Eigen::Infinity>();
        }
        if (took_full) {
            a += dir;
            v = vfull;
        } else {
            double step = 0.5;
            for (;;) {
                if (value(a + step * dir) <= v + 1e-4 * step * slope) break;
                step *= 0.5;
                if (step < 1e-18)
                    raise(Errc::NewtonDivergence, "demand line search stalled");
            }
            a += step * dir;
            v = value(a);
        }
        // no stationary point inside the admissible box: demand is unbounded
        if (a.lpNorm<Eigen::Infinity>() > kUnboundedCutoff) {
            r.iterations = iter;
            return r;
        }
    }
    raise(Errc::NewtonDivergence, "demand Newton exceeded iteration cap");
}

bool verify_clearing(const EquilibriumResult& result, const MarketTree& tree,
                     const AgentProfile& agent1, const AgentProfile& agent2,
                     const std::vector<Claim>& claims, double tol) {
    const MartingaleMeasure q1 =
        dual_optimizer(tree, agent1.gamma, agent1.endowment, combine(claims, result.quantity));
    const MartingaleMeasure q2 =
        dual_optimizer(tree, agent2.gamma, agent2.endowment,
                       combine(claims, Eigen::VectorXd(-result.quantity)));
    for (size_t i = 0; i < claims.size(); ++i) {
        const double pi = result.price(static_cast<Eigen::Index>(i));
        if (std::abs(q1.expectation(claims[i]) - pi) > 10.0 * tol) return false;
        if (std::abs(q2.expectation(claims[i]) - pi) > 10.0 * tol) return false;
    }
    return true;
}

} // namespace entropic
