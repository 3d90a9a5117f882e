#pragma once

#include <string>
#include <utility>
#include <vector>

#include "entropic/market.hpp"
#include "entropic/measures.hpp"

namespace entropic {

constexpr double kGammaMin = 1e-6;
constexpr double kGammaMax = 1e6;

/// Backward-induction value function for the exponential investor holding a
/// terminal wealth claim X: V(node) = min over positions of the one-step
/// certainty expansion, V(leaf) = exp(-gamma X_leaf). Stored in log space.
struct ValueFunction {
    std::vector<double> log_value;    ///< ln V per node id
    TradingStrategy optimal_strategy; ///< utility-maximizing positions
    int iterations = 0;
    double exit_gradient = 0.0;

    double log_root(const MarketTree& tree) const {
        return log_value[static_cast<size_t>(tree.root())];
    }
};

/// Solves the investor problem with total terminal wealth `wealth` (endowment
/// plus any claim position, already combined by the caller).
ValueFunction value_function(const MarketTree& tree, double gamma, const Claim& wealth);

struct PriceQuote {
    double writer = 0.0;
    double buyer = 0.0;
    double gamma = 0.0;
    std::pair<double, double> bounds{0.0, 0.0}; ///< arbitrage-free price interval
    MartingaleMeasure dual_measure;             ///< optimizer of the writer dual problem
    std::string claim_name;
    std::string endowment_name;
};

/// u_gamma(B | E) = -V_root(E + B); the maximizing strategy is recorded in the
/// returned ValueFunction of value_function when needed separately.
double indirect_utility(const MarketTree& tree, double gamma, const Claim& endowment,
                        const Claim& claim);

/// Conditional writer indifference price, computed as a difference of
/// log-value functions: nu_w = (ln V(E - B) - ln V(E)) / gamma. The buyer
/// price is filled through nu_b(B) = -nu_w(-B).
PriceQuote writer_price(const MarketTree& tree, double gamma, const Claim& endowment,
                        const Claim& claim);

PriceQuote buyer_price(const MarketTree& tree, double gamma, const Claim& endowment,
                       const Claim& claim);

/// Scalar prices without the quote plumbing (no bounds, no dual measure);
/// used in inner loops that price many claims against one endowment.
double writer_price_value(const MarketTree& tree, double gamma, const Claim& endowment,
                          const Claim& claim);
double buyer_price_value(const MarketTree& tree, double gamma, const Claim& endowment,
                         const Claim& claim);

/// Writer's indifference price at every node (the dynamic price); the root
/// entry equals writer_price and leaves carry the claim itself.
std::vector<double> price_process(const MarketTree& tree, double gamma,
                                  const Claim& endowment, const Claim& claim);

/// The measure attaining the writer-price dual representation,
/// Q^(gamma B - gamma E).
MartingaleMeasure dual_optimizer(const MarketTree& tree, double gamma,
                                 const Claim& endowment, const Claim& claim);

} // namespace entropic
