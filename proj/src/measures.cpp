#include "entropic/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace entropic {

double MartingaleMeasure::expectation(const Claim& c) const {
    if (c.size() != static_cast<int>(leaf_probs.size()))
        raise(Errc::DimensionMismatch, "claim not shaped for measure");
    double s = 0.0;
    for (int i = 0; i < c.size(); ++i) s += leaf_probs[static_cast<size_t>(i)] * c[i];
    return s;
}

double MartingaleMeasure::variance(const Claim& c) const { return covariance(c, c); }

double MartingaleMeasure::covariance(const Claim& a, const Claim& b) const {
    const double ma = expectation(a);
    const double mb = expectation(b);
    double s = 0.0;
    for (int i = 0; i < a.size(); ++i)
        s += leaf_probs[static_cast<size_t>(i)] * (a[i] - ma) * (b[i] - mb);
    return s;
}

MartingaleMeasure make_measure(const MarketTree& tree,
                               std::vector<std::vector<double>> cond_probs) {
    if (cond_probs.size() != static_cast<size_t>(tree.num_nodes()))
        raise(Errc::DimensionMismatch, "conditional probabilities not shaped for tree");
    MartingaleMeasure q;
    q.cond_probs = std::move(cond_probs);
    q.leaf_probs.assign(static_cast<size_t>(tree.num_leaves()), 0.0);
    std::vector<double> path(static_cast<size_t>(tree.num_nodes()), 0.0);
    path[static_cast<size_t>(tree.root())] = 1.0;
    for (const auto& n : tree.nodes()) {
        if (n.children.empty()) {
            q.leaf_probs[static_cast<size_t>(tree.leaf_index(n.id))] =
                path[static_cast<size_t>(n.id)];
            if (!q.cond_probs[static_cast<size_t>(n.id)].empty())
                raise(Errc::DimensionMismatch, "conditional probabilities at a leaf");
            continue;
        }
        const auto& cp = q.cond_probs[static_cast<size_t>(n.id)];
        if (cp.size() != n.children.size())
            raise(Errc::DimensionMismatch, "conditional probabilities at node " +
                                               std::to_string(n.id) + " do not match children");
        for (size_t k = 0; k < n.children.size(); ++k)
            path[static_cast<size_t>(n.children[k])] = path[static_cast<size_t>(n.id)] * cp[k];
    }
    return q;
}

TiltedMeasure tilt(const MarketTree& tree, const Claim& c) {
    check_claim(tree, c, "tilt");
    const std::vector<double> p = tree.leaf_probabilities();
    double m = c[0];
    for (int i = 0; i < c.size(); ++i) m = std::max(m, c[i]);
    TiltedMeasure t;
    t.leaf_probs.resize(p.size());
    double z = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
        t.leaf_probs[i] = p[i] * std::exp(c[static_cast<int>(i)] - m);
        z += t.leaf_probs[i];
    }
    for (auto& w : t.leaf_probs) w /= z;
    return t;
}

double relative_entropy(const std::vector<double>& q, const std::vector<double>& p) {
    if (q.size() != p.size()) raise(Errc::DimensionMismatch, "measure dimensions differ");
    double h = 0.0;
    for (size_t i = 0; i < q.size(); ++i) {
        if (q[i] < -1e-12) raise(Errc::NonPositiveProbability, "negative mass in q");
        if (q[i] <= 0.0) continue;
        if (p[i] <= 0.0) raise(Errc::NonPositiveProbability, "q not absolutely continuous");
        h += q[i] * std::log(q[i] / p[i]);
    }
    return std::max(0.0, h);
}

EntropyReport minimal_entropy_measure(const MarketTree& tree, const Claim& c, double tol) {
    check_claim(tree, c, "minimal_entropy_measure");
    NewtonOptions opt;
    opt.grad_tol = tol;
    TiltSolution sol = solve_exponential_tilt(tree, c.values, opt);

    EntropyReport report;
    report.measure = make_measure(tree, sol.cond_probs);
    report.iterations = sol.total_iterations;
    report.exit_gradient = sol.max_exit_gradient;

    // H(Q^(c) | P_c) = ln E[e^c] - ln min_theta E[e^{c + gains(theta)}],
    // evaluated in log space so large tilts cannot overflow.
    const std::vector<double> p = tree.leaf_probabilities();
    double m = c[0];
    for (int i = 0; i < c.size(); ++i) m = std::max(m, c[i]);
    double z = 0.0;
    for (size_t i = 0; i < p.size(); ++i) z += p[i] * std::exp(c[static_cast<int>(i)] - m);
    const double log_norm = m + std::log(z);
    report.entropy = std::max(0.0, log_norm - sol.log_value[static_cast<size_t>(tree.root())]);
    return report;
}

double penalty(const MarketTree& tree, const MartingaleMeasure& q, const Claim& c) {
    const TiltedMeasure pc = tilt(tree, c);
    const EntropyReport best = minimal_entropy_measure(tree, c);
    const double h = relative_entropy(q.leaf_probs, pc.leaf_probs) -
                     relative_entropy(best.measure.leaf_probs, pc.leaf_probs);
    return std::max(0.0, h);
}

std::pair<double, double> price_bounds(const MarketTree& tree, const Claim& claim) {
    check_claim(tree, claim, "price_bounds");
    require_no_arbitrage(tree);

    std::vector<double> lo(static_cast<size_t>(tree.num_nodes()), 0.0);
    std::vector<double> hi(static_cast<size_t>(tree.num_nodes()), 0.0);
    for (int id : tree.leaves()) {
        lo[static_cast<size_t>(id)] = claim[tree.leaf_index(id)];
        hi[static_cast<size_t>(id)] = claim[tree.leaf_index(id)];
    }
    std::vector<int> order;
    for (const auto& n : tree.nodes())
        if (!n.children.empty()) order.push_back(n.id);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return tree.node(a).time > tree.node(b).time; });

    for (int id : order) {
        const auto vertices = node_polytope_vertices(tree, id);
        const auto& ch = tree.node(id).children;
        double best_lo = std::numeric_limits<double>::infinity();
        double best_hi = -std::numeric_limits<double>::infinity();
        for (const auto& v : vertices) {
            double vlo = 0.0, vhi = 0.0;
            for (size_t k = 0; k < ch.size(); ++k) {
                vlo += v(static_cast<Eigen::Index>(k)) * lo[static_cast<size_t>(ch[k])];
                vhi += v(static_cast<Eigen::Index>(k)) * hi[static_cast<size_t>(ch[k])];
            }
            best_lo = std::min(best_lo, vlo);
            best_hi = std::max(best_hi, vhi);
        }
        lo[static_cast<size_t>(id)] = best_lo;
        hi[static_cast<size_t>(id)] = best_hi;
    }
    return {lo[static_cast<size_t>(tree.root())], hi[static_cast<size_t>(tree.root())]};
}

bool verify_martingale(const MarketTree& tree, const MartingaleMeasure& q, double tol) {
    if (q.cond_probs.size() != static_cast<size_t>(tree.num_nodes())) return false;
    for (const auto& n : tree.nodes()) {
        const auto& cp = q.cond_probs[static_cast<size_t>(n.id)];
        if (n.children.empty()) {
            if (!cp.empty()) return false;
            continue;
        }
        if (cp.size() != n.children.size()) return false;
        double sum = 0.0;
        Eigen::VectorXd defect = Eigen::VectorXd::Zero(tree.num_assets());
        for (size_t k = 0; k < cp.size(); ++k) {
            if (cp[k] < -tol) return false;
            sum += cp[k];
            defect += cp[k] * tree.price_increment(n.id, static_cast<int>(k));
        }
        if (std::abs(sum - 1.0) > std::max(tol, 1e-12)) return false;
        if (defect.lpNorm<Eigen::Infinity>() > tol) return false;
    }
    return true;
}

} // namespace entropic
