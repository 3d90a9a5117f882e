#pragma once

#include <utility>
#include <vector>

#include "entropic/market.hpp"
#include "entropic/tilt_solver.hpp"

namespace entropic {

/// A martingale measure given by its conditional probabilities at every
/// non-terminal node (aligned with the node's children order) together with
/// the derived leaf probabilities in leaf order.
struct MartingaleMeasure {
    std::vector<std::vector<double>> cond_probs; ///< indexed by node id, empty at leaves
    std::vector<double> leaf_probs;

    double expectation(const Claim& c) const;
    double variance(const Claim& c) const;
    double covariance(const Claim& a, const Claim& b) const;
};

/// Rebuilds leaf probabilities from conditionals and validates the shape.
MartingaleMeasure make_measure(const MarketTree& tree,
                               std::vector<std::vector<double>> cond_probs);

/// Leaf measure with density proportional to exp(c) against P.
struct TiltedMeasure {
    std::vector<double> leaf_probs;
};

struct EntropyReport {
    MartingaleMeasure measure;
    double entropy = 0.0; ///< H(Q^(c) | P_c)
    int iterations = 0;
    double exit_gradient = 0.0;
};

/// P_c: leaf weights exp(c)*p normalized. c == constant returns P itself.
TiltedMeasure tilt(const MarketTree& tree, const Claim& c);

/// Relative entropy sum q ln(q/p) with the 0 ln 0 = 0 convention.
/// Requires q << p, which full support of p guarantees.
double relative_entropy(const std::vector<double>& q, const std::vector<double>& p);

/// The measure in M_a minimizing H(Q | P_c), found by per-node damped-Newton
/// minimization backward through the tree. c == 0 yields the minimal-entropy
/// martingale measure Q0.
EntropyReport minimal_entropy_measure(const MarketTree& tree, const Claim& c,
                                      double tol = 1e-12);

/// Penalty h_c(q) = H(q|P_c) - H(Q^(c)|P_c); zero exactly at the optimizer.
double penalty(const MarketTree& tree, const MartingaleMeasure& q, const Claim& c);

/// inf/sup of E^Q[claim] over all martingale measures, by backward recursion
/// with exact vertex enumeration of each one-step polytope.
std::pair<double, double> price_bounds(const MarketTree& tree, const Claim& claim);

/// Checks positivity, normalization and the nodewise martingale constraint at
/// tolerance tol.
bool verify_martingale(const MarketTree& tree, const MartingaleMeasure& q, double tol = 1e-10);

} // namespace entropic
