#pragma once

#include <random>
#include <vector>

#include "entropic/market.hpp"

namespace fixtures {

using entropic::Claim;
using entropic::MarketTree;
using entropic::TreeNodeSpec;

// One-period binomial: S0 = 1 -> {0.9, 1.2}, P = (1/2, 1/2). Complete.
inline MarketTree b2() {
    return MarketTree::build({
        {0, std::nullopt, 1.0, {1.0, 1.0}},
        {1, 0, 0.5, {1.0, 0.9}},
        {2, 0, 0.5, {1.0, 1.2}},
    });
}

// One-period trinomial: S0 = 1 -> {0.8, 1.0, 1.3}, P uniform. Incomplete;
// martingale polytope q(t) = (1.5t, 1 - 2.5t, t), t in [0, 0.4].
inline MarketTree t1() {
    return MarketTree::build({
        {0, std::nullopt, 1.0, {1.0, 1.0}},
        {1, 0, 1.0 / 3.0, {1.0, 0.8}},
        {2, 0, 1.0 / 3.0, {1.0, 1.0}},
        {3, 0, 1.0 / 3.0, {1.0, 1.3}},
    });
}

// One-period trinomial whose P is already a martingale measure.
inline MarketTree p_martingale() {
    return MarketTree::build({
        {0, std::nullopt, 1.0, {1.0, 1.0}},
        {1, 0, 0.25, {1.0, 0.8}},
        {2, 0, 0.50, {1.0, 1.0}},
        {3, 0, 0.25, {1.0, 1.2}},
    });
}

// Two periods of trinomial branching (multiplicative moves x0.8, x1.0, x1.3),
// nine leaves, uniform P. Four non-terminal nodes, each with a
// one-dimensional martingale polytope.
inline MarketTree two_period() {
    std::vector<TreeNodeSpec> specs;
    specs.push_back({0, std::nullopt, 1.0, {1.0, 1.0}});
    const double moves[3] = {0.8, 1.0, 1.3};
    int id = 1;
    for (double m1 : moves) specs.push_back({id++, 0, 1.0 / 3.0, {1.0, m1}});
    for (int p = 1; p <= 3; ++p) {
        const double s = specs[static_cast<size_t>(p)].prices[1];
        for (double m2 : moves) specs.push_back({id++, p, 1.0 / 3.0, {1.0, s * m2}});
    }
    return MarketTree::build(specs);
}

// Trinomial market move in period one, then a coin flip with frozen prices.
// Claims on the coin are independent of the asset and of any
// period-one-measurable endowment. Six leaves.
inline MarketTree coin_tree() {
    std::vector<TreeNodeSpec> specs;
    specs.push_back({0, std::nullopt, 1.0, {1.0, 1.0}});
    const double moves[3] = {0.8, 1.0, 1.3};
    int id = 1;
    for (double m1 : moves) specs.push_back({id++, 0, 1.0 / 3.0, {1.0, m1}});
    for (int p = 1; p <= 3; ++p) {
        const double s = specs[static_cast<size_t>(p)].prices[1];
        specs.push_back({id++, p, 0.5, {1.0, s}});
        specs.push_back({id++, p, 0.5, {1.0, s}});
    }
    return MarketTree::build(specs);
}

// Indicator of the highest-price leaf of a one-period tree (leaf order is
// depth-first by id, so the up state is last).
inline Claim up_indicator(const MarketTree& tree) {
    Claim c = Claim::zeros(tree.num_leaves());
    c[tree.num_leaves() - 1] = 1.0;
    return c;
}

// One period, two risky assets, four states with product increments
// (+-0.1, +-0.2). The replicable subspace is three-dimensional, leaving one
// non-replicable direction. P is skewed so the entropy minimizer is interior
// but not P itself.
inline MarketTree two_asset() {
    return MarketTree::build({
        {0, std::nullopt, 1.0, {1.0, 1.0, 2.0}},
        {1, 0, 0.4, {1.0, 0.9, 1.8}},
        {2, 0, 0.1, {1.0, 0.9, 2.2}},
        {3, 0, 0.2, {1.0, 1.1, 1.8}},
        {4, 0, 0.3, {1.0, 1.1, 2.2}},
    });
}

// Three periods of binomial branching (x0.9 / x1.2), eight leaves.
inline MarketTree three_period() {
    std::vector<TreeNodeSpec> specs;
    specs.push_back({0, std::nullopt, 1.0, {1.0, 1.0}});
    int id = 1;
    std::vector<int> frontier{0};
    for (int t = 0; t < 3; ++t) {
        std::vector<int> next;
        for (int p : frontier) {
            const double s = specs[static_cast<size_t>(p)].prices[1];
            specs.push_back({id, p, 0.5, {1.0, s * 0.9}});
            next.push_back(id++);
            specs.push_back({id, p, 0.5, {1.0, s * 1.2}});
            next.push_back(id++);
        }
        frontier = next;
    }
    return MarketTree::build(specs);
}

// Heads-indicator on the coin tree: depends on the second period only.
inline Claim coin_claim(const MarketTree& tree) {
    Claim c = Claim::zeros(tree.num_leaves());
    for (int i = 0; i < tree.num_leaves(); i += 2) c[i] = 1.0;
    return c;
}

// Endowment measurable at period one on the coin tree (same value on both
// coin outcomes below each market node).
inline Claim market_endowment(const MarketTree& tree, double lo, double mid, double hi) {
    Claim c = Claim::zeros(tree.num_leaves());
    const double v[3] = {lo, mid, hi};
    for (int i = 0; i < tree.num_leaves(); ++i) c[i] = v[(i / 2) % 3];
    return c;
}

inline Claim random_claim(const MarketTree& tree, std::mt19937_64& rng, double bound = 5.0) {
    std::uniform_real_distribution<double> u(-bound, bound);
    Claim c = Claim::zeros(tree.num_leaves());
    for (auto& v : c.values) v = u(rng);
    return c;
}

inline entropic::TradingStrategy random_strategy(const MarketTree& tree, std::mt19937_64& rng,
                                                 double bound = 2.0) {
    std::uniform_real_distribution<double> u(-bound, bound);
    auto s = entropic::TradingStrategy::zeros(tree);
    for (auto& p : s.positions)
        for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = u(rng);
    return s;
}

} // namespace fixtures
