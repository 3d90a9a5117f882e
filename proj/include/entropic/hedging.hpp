#pragma once

#include <vector>

#include <Eigen/Dense>

#include "entropic/market.hpp"
#include "entropic/measures.hpp"

namespace entropic {

enum class Side { Writer, Buyer };

/// Exact decomposition claim = price + terminal_gains(strategy) + residual,
/// together with the residual process along the tree. For the buyer side the
/// decomposed claim is the buyer's liability -B, matching
/// R^b(B) = R^w(-B).
struct Decomposition {
    Claim claim;        ///< the claim actually decomposed
    double price = 0.0; ///< its conditional indifference price
    TradingStrategy strategy;
    Claim residual;
    std::vector<double> residual_process; ///< per node id, zero at the root
};

struct ProjectionResult {
    Eigen::MatrixXd matrix;       ///< projected variance-covariance, n x n
    std::vector<Claim> residuals; ///< projection residual per component
};

/// Conditional optimal hedge: difference of the value-function optimizers of
/// the problems with wealth E - B and with wealth E.
TradingStrategy optimal_strategy(const MarketTree& tree, double gamma,
                                 const Claim& endowment, const Claim& claim);

Decomposition residual_risk(const MarketTree& tree, double gamma, const Claim& endowment,
                            const Claim& claim, Side side = Side::Writer);

struct KwDecomposition {
    double mean = 0.0;
    TradingStrategy strategy;
    Claim orthogonal;
};

/// L2(q) projection of the claim onto constants plus attainable gains; the
/// orthogonal part has zero q-mean and zero q-inner product with every gains
/// claim.
KwDecomposition kw_decompose(const MarketTree& tree, const MartingaleMeasure& q,
                             const Claim& claim);

/// Projected variance-covariance matrix of a claim vector under q. Entry
/// (i, j) is the q-inner product of the projection residuals of claims i, j.
ProjectionResult projected_variance(const MarketTree& tree, const MartingaleMeasure& q,
                                    const std::vector<Claim>& claims);

/// Scalar shorthand for a single claim.
double projected_variance_scalar(const MarketTree& tree, const MartingaleMeasure& q,
                                 const Claim& claim);

} // namespace entropic
