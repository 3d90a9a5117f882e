#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "entropic/market.hpp"

namespace entropic {

struct NewtonOptions {
    double grad_tol = 1e-12;
    int max_iterations = 200;
    double armijo_slope = 1e-4;
    double backtrack_factor = 0.5;
    double initial_step = 1.0;
    /// Optional warm start for the per-node exponent positions (one d-vector
    /// per non-terminal node); zero start otherwise.
    std::optional<TradingStrategy> start;
};

/// Output of the backward log-exponential recursion.
///
/// For a terminal exponent C (one value per leaf), the recursion computes at
/// every node
///     LV(node) = ln min_theta sum_children p_j exp(theta . dS_j + LV(child_j)),
/// with LV(leaf) = C_leaf. The minimizing `theta` at each node is the
/// exponent-space position; the induced conditional probabilities
///     q_j ∝ p_j exp(theta* . dS_j + LV(child_j))
/// satisfy the one-step martingale constraint sum_j q_j dS_j = 0 because
/// theta* is a stationary point.
///
/// Everything downstream reads off this one solve:
///  - LV(root) = ln min_theta E[exp(C + gains(theta))],
///  - the leaf density of the entropy-minimal measure relative to P_C is
///    proportional to exp(C + gains(theta*)),
///  - utility problems use C = -gamma * (terminal wealth claim), in which case
///    the optimal trading strategy is -theta*/gamma.
struct TiltSolution {
    std::vector<double> log_value;               ///< LV per node id
    TradingStrategy exponent_strategy;           ///< theta* per non-terminal node
    std::vector<std::vector<double>> cond_probs; ///< optimal conditionals per node id
    int total_iterations = 0;
    double max_exit_gradient = 0.0; ///< sup over nodes of ||grad|| at exit
};

TiltSolution solve_exponential_tilt(const MarketTree& tree,
                                    const std::vector<double>& leaf_exponent,
                                    const NewtonOptions& options = {});

/// Verifies that every node admits a strictly positive one-step martingale
/// measure (the no-arbitrage condition behind every engine); throws
/// NoMartingaleMeasure otherwise. Results are cached per call site by the
/// callers, not here.
void require_no_arbitrage(const MarketTree& tree);

/// Vertices of the one-step polytope {q >= 0, sum q = 1, sum q_j dS_j = 0}
/// at a non-terminal node, found by basic-solution enumeration.
std::vector<Eigen::VectorXd> node_polytope_vertices(const MarketTree& tree, int node_id);

} // namespace entropic
