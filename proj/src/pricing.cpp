#include "entropic/pricing.hpp"

#include <cmath>

namespace entropic {

namespace {

void check_gamma(double gamma) {
    if (!(gamma >= kGammaMin && gamma <= kGammaMax))
        raise(Errc::GammaOutOfRange, "risk aversion must lie in [1e-6, 1e6], got " +
                                         std::to_string(gamma));
}

std::vector<double> scaled_exponent(double gamma, const Claim& wealth) {
    std::vector<double> c(wealth.values.size());
    for (size_t i = 0; i < c.size(); ++i) c[i] = -gamma * wealth.values[i];
    return c;
}

} // namespace

ValueFunction value_function(const MarketTree& tree, double gamma, const Claim& wealth) {
    check_gamma(gamma);
    check_claim(tree, wealth, "value_function");
    TiltSolution sol = solve_exponential_tilt(tree, scaled_exponent(gamma, wealth));
    ValueFunction v;
    v.log_value = std::move(sol.log_value);
    // The solver works on the exponent exp(theta . dS); the investor position
    // holding the wealth claim is -theta/gamma.
    v.optimal_strategy = (-1.0 / gamma) * sol.exponent_strategy;
    v.iterations = sol.total_iterations;
    v.exit_gradient = sol.max_exit_gradient;
    return v;
}

double indirect_utility(const MarketTree& tree, double gamma, const Claim& endowment,
                        const Claim& claim) {
    const ValueFunction v = value_function(tree, gamma, endowment + claim);
    return -std::exp(v.log_root(tree));
}

PriceQuote writer_price(const MarketTree& tree, double gamma, const Claim& endowment,
                        const Claim& claim) {
    check_gamma(gamma);
    check_claim(tree, endowment, "writer_price");
    check_claim(tree, claim, "writer_price");

    const ValueFunction with_sale = value_function(tree, gamma, endowment - claim);
    const ValueFunction with_purchase = value_function(tree, gamma, endowment + claim);
    const ValueFunction status_quo = value_function(tree, gamma, endowment);

    PriceQuote quote;
    quote.gamma = gamma;
    quote.writer = (with_sale.log_root(tree) - status_quo.log_root(tree)) / gamma;
    quote.buyer = -(with_purchase.log_root(tree) - status_quo.log_root(tree)) / gamma;
    quote.bounds = price_bounds(tree, claim);
    quote.dual_measure = dual_optimizer(tree, gamma, endowment, claim);
    return quote;
}

PriceQuote buyer_price(const MarketTree& tree, double gamma, const Claim& endowment,
                       const Claim& claim) {
    return writer_price(tree, gamma, endowment, claim);
}

double writer_price_value(const MarketTree& tree, double gamma, const Claim& endowment,
                          const Claim& claim) {
    check_gamma(gamma);
    check_claim(tree, endowment, "writer_price_value");
    check_claim(tree, claim, "writer_price_value");
    const ValueFunction with_sale = value_function(tree, gamma, endowment - claim);
    const ValueFunction status_quo = value_function(tree, gamma, endowment);
    return (with_sale.log_root(tree) - status_quo.log_root(tree)) / gamma;
}

double buyer_price_value(const MarketTree& tree, double gamma, const Claim& endowment,
                         const Claim& claim) {
    return -writer_price_value(tree, gamma, endowment, -claim);
}

std::vector<double> price_process(const MarketTree& tree, double gamma,
                                  const Claim& endowment, const Claim& claim) {
    check_gamma(gamma);
    check_claim(tree, endowment, "price_process");
    check_claim(tree, claim, "price_process");
    const ValueFunction with_sale = value_function(tree, gamma, endowment - claim);
    const ValueFunction status_quo = value_function(tree, gamma, endowment);
    std::vector<double> nu(static_cast<size_t>(tree.num_nodes()));
    for (int i = 0; i < tree.num_nodes(); ++i)
        nu[static_cast<size_t>(i)] = (with_sale.log_value[static_cast<size_t>(i)] -
                                      status_quo.log_value[static_cast<size_t>(i)]) /
                                     gamma;
    return nu;
}

MartingaleMeasure dual_optimizer(const MarketTree& tree, double gamma,
                                 const Claim& endowment, const Claim& claim) {
    check_gamma(gamma);
    check_claim(tree, endowment, "dual_optimizer");
    check_claim(tree, claim, "dual_optimizer");
    // The writer supremum is attained by the entropy minimizer relative to
    // P_{gamma B - gamma E}, which is exactly the tilted optimum of the
    // value problem for the wealth E - B.
    TiltSolution sol =
        solve_exponential_tilt(tree, scaled_exponent(gamma, endowment - claim));
    return make_measure(tree, sol.cond_probs);
}

} // namespace entropic
