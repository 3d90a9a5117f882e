#pragma once

#include <vector>

#include <Eigen/Dense>

#include "entropic/agreement.hpp"
#include "entropic/hedging.hpp"
#include "entropic/market.hpp"

namespace entropic {

/// Second-order model of the writer price a -> nu_w(a . B | E) around a base
/// point: gradient from the shifted dual measure, Hessian gamma * Delta under
/// the same measure.
struct Expansion {
    Eigen::VectorXd base;
    Eigen::VectorXd gradient;
    Eigen::MatrixXd hessian;

    double value_at(const Eigen::VectorXd& direction, double eps) const {
        return eps * gradient.dot(direction) +
               0.5 * eps * eps * direction.dot(hessian * direction);
    }
};

enum class TradeDirection { BuySegment, SellSegment, None };

struct TradeClassification {
    TradeDirection direction = TradeDirection::None;
    bool degenerate = false; ///< claim replicable, prices linear
};

/// Gradient of a -> nu_w(a . B | E): the claim expectations under
/// Q^(gamma a.B - gamma E).
Eigen::VectorXd price_gradient(const MarketTree& tree, double gamma, const Claim& endowment,
                               const std::vector<Claim>& claims, const Eigen::VectorXd& a);

/// Hessian gamma * Delta^{Q^(gamma a.B - gamma E)}(B).
Eigen::MatrixXd price_hessian(const MarketTree& tree, double gamma, const Claim& endowment,
                              const std::vector<Claim>& claims, const Eigen::VectorXd& a);

Expansion price_expansion(const MarketTree& tree, double gamma, const Claim& endowment,
                          const std::vector<Claim>& claims, const Eigen::VectorXd& a);

/// Second-order approximation of nu_w(eps a . B | E) around zero holdings.
double expand_price(const MarketTree& tree, double gamma, const Claim& endowment,
                    const std::vector<Claim>& claims, const Eigen::VectorXd& a, double eps);

/// Sign test for small-trade strict agreement: a positive segment exists iff
/// the claim is cheaper under agent 1's zero-trade dual measure than under
/// agent 2's.
TradeClassification small_trade_direction(const MarketTree& tree, const AgentProfile& agent1,
                                          const AgentProfile& agent2, const Claim& claim);

/// Second-order width of the agreeable price interval for alpha units.
double approx_interval_width(const MarketTree& tree, const AgentProfile& agent1,
                             const AgentProfile& agent2, const Claim& claim, double alpha);

/// Closed-form approximation of the partial-equilibrium quantity.
double approx_peq(const MarketTree& tree, const AgentProfile& agent1,
                  const AgentProfile& agent2, const Claim& claim);

} // namespace entropic
