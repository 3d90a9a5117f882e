#include "entropic/asymptotics.hpp"

#include <cmath>

#include "entropic/pricing.hpp"

namespace entropic {

namespace {

Claim combine(const std::vector<Claim>& claims, const Eigen::VectorXd& a) {
    if (claims.empty() || a.size() != static_cast<Eigen::Index>(claims.size()))
        raise(Errc::DimensionMismatch, "weight vector does not match claim vector");
    Claim total = Claim::zeros(claims.front().size());
    for (size_t i = 0; i < claims.size(); ++i)
        total = total + a(static_cast<Eigen::Index>(i)) * claims[i];
    return total;
}

} // namespace

Eigen::VectorXd price_gradient(const MarketTree& tree, double gamma, const Claim& endowment,
                               const std::vector<Claim>& claims, const Eigen::VectorXd& a) {
    const MartingaleMeasure q = dual_optimizer(tree, gamma, endowment, combine(claims, a));
    Eigen::VectorXd g(a.size());
    for (size_t i = 0; i < claims.size(); ++i)
        g(static_cast<Eigen::Index>(i)) = q.expectation(claims[i]);
    return g;
}

Eigen::MatrixXd price_hessian(const MarketTree& tree, double gamma, const Claim& endowment,
                              const std::vector<Claim>& claims, const Eigen::VectorXd& a) {
    const MartingaleMeasure q = dual_optimizer(tree, gamma, endowment, combine(claims, a));
    return gamma * projected_variance(tree, q, claims).matrix;
}

Expansion price_expansion(const MarketTree& tree, double gamma, const Claim& endowment,
                          const std::vector<Claim>& claims, const Eigen::VectorXd& a) {
    Expansion e;
    e.base = a;
    const MartingaleMeasure q = dual_optimizer(tree, gamma, endowment, combine(claims, a));
    e.gradient.resize(a.size());
    for (size_t i = 0; i < claims.size(); ++i)
        e.gradient(static_cast<Eigen::Index>(i)) = q.expectation(claims[i]);
    e.hessian = gamma * projected_variance(tree, q, claims).matrix;
    return e;
}

double expand_price(const MarketTree& tree, double gamma, const Claim& endowment,
                    const std::vector<Claim>& claims, const Eigen::VectorXd& a, double eps) {
    const Expansion e =
        price_expansion(tree, gamma, endowment, claims, Eigen::VectorXd::Zero(a.size()));
    return e.value_at(a, eps);
}

TradeClassification small_trade_direction(const MarketTree& tree, const AgentProfile& agent1,
                                          const AgentProfile& agent2, const Claim& claim) {
    check_claim(tree, claim, "small_trade_direction");
    TradeClassification c;
    if (replicate(tree, claim)) {
        c.degenerate = true;
        return c;
    }
    const Claim zero = Claim::zeros(tree.num_leaves());
    const MartingaleMeasure q1 = dual_optimizer(tree, agent1.gamma, agent1.endowment, zero);
    const MartingaleMeasure q2 = dual_optimizer(tree, agent2.gamma, agent2.endowment, zero);
    const double p1 = q1.expectation(claim);
    const double p2 = q2.expectation(claim);
    if (p1 < p2 - 1e-10)
        c.direction = TradeDirection::BuySegment;
    else if (p1 > p2 + 1e-10)
        c.direction = TradeDirection::SellSegment;
    return c;
}

double approx_interval_width(const MarketTree& tree, const AgentProfile& agent1,
                             const AgentProfile& agent2, const Claim& claim, double alpha) {
    const Claim zero = Claim::zeros(tree.num_leaves());
    const MartingaleMeasure q1 = dual_optimizer(tree, agent1.gamma, agent1.endowment, zero);
    const MartingaleMeasure q2 = dual_optimizer(tree, agent2.gamma, agent2.endowment, zero);
    const double linear = q2.expectation(claim) - q1.expectation(claim);
    const double curvature = agent1.gamma * projected_variance_scalar(tree, q1, claim) +
                             agent2.gamma * projected_variance_scalar(tree, q2, claim);
    return alpha * linear - 0.5 * alpha * alpha * curvature;
}

double approx_peq(const MarketTree& tree, const AgentProfile& agent1,
                  const AgentProfile& agent2, const Claim& claim) {
    const Claim zero = Claim::zeros(tree.num_leaves());
    const MartingaleMeasure q1 = dual_optimizer(tree, agent1.gamma, agent1.endowment, zero);
    const MartingaleMeasure q2 = dual_optimizer(tree, agent2.gamma, agent2.endowment, zero);
    const double numer = q2.expectation(claim) - q1.expectation(claim);
    const double denom = agent1.gamma * projected_variance_scalar(tree, q1, claim) +
                         agent2.gamma * projected_variance_scalar(tree, q2, claim);
    if (denom <= 1e-12)
        raise(Errc::DegenerateClaim, "projected variances vanish; claim is replicable");
    return numer / denom;
}

} // namespace entropic
