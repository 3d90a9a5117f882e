#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "entropic/agreement.hpp"
#include "entropic/market.hpp"

namespace entropic {

/// Unique market-clearing pair for a claim bundle. `quantity` is the number
/// of units agent 1 writes and agent 2 buys: it minimizes the strictly convex
/// excess objective f(a) = nu_w1(a.B) - nu_b2(a.B), and the clearing price is
/// the writer-side marginal price at the minimizer.
struct EquilibriumResult {
    Eigen::VectorXd quantity;
    Eigen::VectorXd price;
    double grad_norm = 0.0;
    int iterations = 0;
    double clearing_residual = 0.0;
};

struct ExcessObjective {
    double value = 0.0;
    Eigen::VectorXd gradient;
    Eigen::MatrixXd hessian;
};

/// f(a) together with gradient E^{Q1(a)}[B] - E^{Q2(-a)}[B] and Hessian
/// gamma1 Delta^{Q1(a)} + gamma2 Delta^{Q2(-a)}. Validates once per call that
/// no nonzero combination a . B is replicable.
ExcessObjective excess_objective(const MarketTree& tree, const AgentProfile& agent1,
                                 const AgentProfile& agent2, const std::vector<Claim>& claims,
                                 const Eigen::VectorXd& a);

EquilibriumResult solve_pepq(const MarketTree& tree, const AgentProfile& agent1,
                             const AgentProfile& agent2, const std::vector<Claim>& claims,
                             double tol = 1e-10,
                             const std::optional<Eigen::VectorXd>& start = std::nullopt);

struct DemandResult {
    bool bounded = false;
    Eigen::VectorXd quantity; ///< meaningful only when bounded
    int iterations = 0;
};

/// The agent's utility-maximizing holding of the bundle at price p, i.e. the
/// maximizer of nu_b(a . B) - a . p; unbounded when p admits no stationary
/// point within |a|_inf <= 1e6.
DemandResult demand(const MarketTree& tree, const AgentProfile& agent,
                    const std::vector<Claim>& claims, const Eigen::VectorXd& p);

/// Recomputes both dual expectations at the solved quantity independently and
/// checks them against the reported price at 10x the solver tolerance.
bool verify_clearing(const EquilibriumResult& result, const MarketTree& tree,
                     const AgentProfile& agent1, const AgentProfile& agent2,
                     const std::vector<Claim>& claims, double tol = 1e-10);

} // namespace entropic
