#pragma once

#include <optional>
#include <string>
#include <utility>

#include "entropic/market.hpp"
#include "entropic/pricing.hpp"

namespace entropic {

struct AgentProfile {
    double gamma = 1.0;
    Claim endowment;
    std::string endowment_name;
};

enum class Agreeability { Strict, Weak, None };

struct AgreementReport {
    double writer = 0.0; ///< nu_w of agent 1
    double buyer = 0.0;  ///< nu_b of agent 2
    std::optional<std::pair<double, double>> interval;
    bool strict = false;
    double sigma = 0.0; ///< maximal excess score
    Claim optimal_claim;
    bool bstar_replicable = false;
};

/// Width below which the agreeable-price interval counts as degenerate.
constexpr double kAgreementTol = 1e-10;

/// Mutually agreeable prices for the claim form [nu_w1, nu_b2] when nonempty.
AgreementReport agreement_interval(const MarketTree& tree, const AgentProfile& agent1,
                                   const AgentProfile& agent2, const Claim& claim);

/// The score-optimal transfer (gamma1 E1 - gamma2 E2) / (gamma1 + gamma2),
/// unique up to replicability.
Claim optimal_claim(const MarketTree& tree, const AgentProfile& agent1,
                    const AgentProfile& agent2);

/// Maximal excess score Sigma = nu_b2(B*) - nu_w1(B*); strictly positive iff
/// some claim is strictly mutually agreeable.
std::pair<double, Claim> max_excess_score(const MarketTree& tree, const AgentProfile& agent1,
                                          const AgentProfile& agent2);

/// Score of an allocation: sum of the agents' unconditional buyer prices.
double score(const MarketTree& tree, const AgentProfile& agent1, const AgentProfile& agent2,
             const Claim& b1, const Claim& b2);

Agreeability is_agreeable(const MarketTree& tree, const AgentProfile& agent1,
                          const AgentProfile& agent2, const Claim& claim);

} // namespace entropic
