#include "entropic/hedging.hpp"

#include <cmath>

#include "entropic/pricing.hpp"

namespace entropic {

TradingStrategy optimal_strategy(const MarketTree& tree, double gamma,
                                 const Claim& endowment, const Claim& claim) {
    const ValueFunction with_sale = value_function(tree, gamma, endowment - claim);
    const ValueFunction status_quo = value_function(tree, gamma, endowment);
    return with_sale.optimal_strategy - status_quo.optimal_strategy;
}

Decomposition residual_risk(const MarketTree& tree, double gamma, const Claim& endowment,
                            const Claim& claim, Side side) {
    check_claim(tree, endowment, "residual_risk");
    check_claim(tree, claim, "residual_risk");
    // The buyer's residual risk is the writer's for the opposite claim.
    const Claim target = (side == Side::Writer) ? claim : -claim;

    Decomposition d;
    d.claim = target;
    d.strategy = optimal_strategy(tree, gamma, endowment, target);
    const std::vector<double> nu = price_process(tree, gamma, endowment, target);
    d.price = nu[static_cast<size_t>(tree.root())];
    d.residual = target - d.price - terminal_gains(tree, d.strategy);

    // R_t = nu_t - nu_0 - accumulated gains along the path.
    d.residual_process.assign(static_cast<size_t>(tree.num_nodes()), 0.0);
    std::vector<double> acc(static_cast<size_t>(tree.num_nodes()), 0.0);
    for (const auto& n : tree.nodes()) {
        for (size_t k = 0; k < n.children.size(); ++k) {
            const int child = n.children[k];
            acc[static_cast<size_t>(child)] =
                acc[static_cast<size_t>(n.id)] +
                d.strategy.positions[static_cast<size_t>(n.id)].dot(
                    tree.price_increment(n.id, static_cast<int>(k)));
        }
        d.residual_process[static_cast<size_t>(n.id)] =
            nu[static_cast<size_t>(n.id)] - d.price - acc[static_cast<size_t>(n.id)];
    }
    return d;
}

namespace {

struct WeightedProjection {
    GainsBasis basis;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr;
    Eigen::VectorXd sqrt_w;
};

WeightedProjection prepare_projection(const MarketTree& tree, const MartingaleMeasure& q) {
    if (q.leaf_probs.size() != static_cast<size_t>(tree.num_leaves()))
        raise(Errc::DimensionMismatch, "measure not shaped for tree");
    WeightedProjection wp;
    wp.sqrt_w.resize(tree.num_leaves());
    for (int i = 0; i < tree.num_leaves(); ++i) {
        const double w = q.leaf_probs[static_cast<size_t>(i)];
        if (w <= 0.0)
            raise(Errc::NonPositiveProbability, "projection requires a strictly positive measure");
        wp.sqrt_w(i) = std::sqrt(w);
    }
    wp.basis = replication_basis(tree);
    Eigen::MatrixXd weighted = wp.sqrt_w.asDiagonal() * wp.basis.columns;
    wp.qr.setThreshold(1e-12);
    wp.qr.compute(weighted);
    if (wp.qr.rank() < weighted.cols())
        raise(Errc::SingularGram, "gains basis is rank deficient under the measure");
    return wp;
}

struct ProjectionParts {
    Eigen::VectorXd coeffs; // constant first, then gains coefficients
    Claim residual;
};

ProjectionParts project(const WeightedProjection& wp, const Claim& c) {
    Eigen::VectorXd b(c.size());
    for (int i = 0; i < c.size(); ++i) b(i) = c[i];
    ProjectionParts parts;
    parts.coeffs = wp.qr.solve(wp.sqrt_w.asDiagonal() * b);
    Eigen::VectorXd resid = b - wp.basis.columns * parts.coeffs;
    parts.residual = Claim(std::vector<double>(resid.data(), resid.data() + resid.size()));
    return parts;
}

} // namespace

KwDecomposition kw_decompose(const MarketTree& tree, const MartingaleMeasure& q,
                             const Claim& claim) {
    check_claim(tree, claim, "kw_decompose");
    const WeightedProjection wp = prepare_projection(tree, q);
    const ProjectionParts parts = project(wp, claim);
    KwDecomposition kw;
    kw.mean = q.expectation(claim);
    kw.strategy =
        wp.basis.to_strategy(tree, parts.coeffs.tail(parts.coeffs.size() - 1));
    kw.orthogonal = parts.residual;
    return kw;
}

ProjectionResult projected_variance(const MarketTree& tree, const MartingaleMeasure& q,
                                    const std::vector<Claim>& claims) {
    if (claims.empty()) raise(Errc::DimensionMismatch, "empty claim vector");
    for (const auto& c : claims) check_claim(tree, c, "projected_variance");
    const WeightedProjection wp = prepare_projection(tree, q);

    const int n = static_cast<int>(claims.size());
    ProjectionResult r;
    r.residuals.reserve(static_cast<size_t>(n));
    for (const auto& c : claims) r.residuals.push_back(project(wp, c).residual);

    r.matrix.resize(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            double s = 0.0;
            for (int l = 0; l < tree.num_leaves(); ++l)
                s += q.leaf_probs[static_cast<size_t>(l)] * r.residuals[static_cast<size_t>(i)][l] *
                     r.residuals[static_cast<size_t>(j)][l];
            r.matrix(i, j) = s;
            r.matrix(j, i) = s;
        }
    }
    return r;
}

double projected_variance_scalar(const MarketTree& tree, const MartingaleMeasure& q,
                                 const Claim& claim) {
    return projected_variance(tree, q, {claim}).matrix(0, 0);
}

} // namespace entropic
