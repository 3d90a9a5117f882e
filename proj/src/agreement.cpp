#include "entropic/agreement.hpp"

#include <cmath>

namespace entropic {

namespace {

void check_agents(const MarketTree& tree, const AgentProfile& a1, const AgentProfile& a2) {
    check_claim(tree, a1.endowment, "agreement");
    check_claim(tree, a2.endowment, "agreement");
}

double writer_value(const MarketTree& tree, const AgentProfile& a, const Claim& claim) {
    return writer_price_value(tree, a.gamma, a.endowment, claim);
}

double buyer_value(const MarketTree& tree, const AgentProfile& a, const Claim& claim) {
    return buyer_price_value(tree, a.gamma, a.endowment, claim);
}

} // namespace

AgreementReport agreement_interval(const MarketTree& tree, const AgentProfile& agent1,
                                   const AgentProfile& agent2, const Claim& claim) {
    check_agents(tree, agent1, agent2);
    check_claim(tree, claim, "agreement_interval");

    AgreementReport r;
    r.writer = writer_value(tree, agent1, claim);
    r.buyer = buyer_value(tree, agent2, claim);
    if (r.writer <= r.buyer) {
        r.interval = std::make_pair(r.writer, r.buyer);
        r.strict = (r.buyer - r.writer) > kAgreementTol;
    }
    auto [sigma, bstar] = max_excess_score(tree, agent1, agent2);
    r.sigma = sigma;
    r.optimal_claim = bstar;
    r.bstar_replicable = replicate(tree, r.optimal_claim).has_value();
    return r;
}

Claim optimal_claim(const MarketTree& tree, const AgentProfile& agent1,
                    const AgentProfile& agent2) {
    if (agent1.endowment.size() != agent2.endowment.size())
        raise(Errc::TreeMismatch, "agents live on different trees");
    check_agents(tree, agent1, agent2);
    const double g1 = agent1.gamma;
    const double g2 = agent2.gamma;
    return (1.0 / (g1 + g2)) * (g1 * agent1.endowment - g2 * agent2.endowment);
}

std::pair<double, Claim> max_excess_score(const MarketTree& tree, const AgentProfile& agent1,
                                          const AgentProfile& agent2) {
    const Claim bstar = optimal_claim(tree, agent1, agent2);
    const double sigma = buyer_value(tree, agent2, bstar) - writer_value(tree, agent1, bstar);
    return {sigma, bstar};
}

double score(const MarketTree& tree, const AgentProfile& agent1, const AgentProfile& agent2,
             const Claim& b1, const Claim& b2) {
    check_agents(tree, agent1, agent2);
    const Claim zero = Claim::zeros(tree.num_leaves());
    const AgentProfile bare1{agent1.gamma, zero, ""};
    const AgentProfile bare2{agent2.gamma, zero, ""};
    return buyer_value(tree, bare1, b1) + buyer_value(tree, bare2, b2);
}

Agreeability is_agreeable(const MarketTree& tree, const AgentProfile& agent1,
                          const AgentProfile& agent2, const Claim& claim) {
    const double w = writer_value(tree, agent1, claim);
    const double b = buyer_value(tree, agent2, claim);
    if (b - w > kAgreementTol) return Agreeability::Strict;
    if (b - w >= -kAgreementTol) return Agreeability::Weak;
    return Agreeability::None;
}

} // namespace entropic
