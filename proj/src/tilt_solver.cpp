#include "entropic/tilt_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace entropic {

namespace {

// ln sum_j exp(a_j), guarded against overflow.
double log_sum_exp(const Eigen::VectorXd& a) {
    const double m = a.maxCoeff();
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (Eigen::Index j = 0; j < a.size(); ++j) s += std::exp(a(j) - m);
    return m + std::log(s);
}

struct NodeProblem {
    Eigen::VectorXd log_weight; // ln p_j + LV(child_j), shifted by caller
    Eigen::MatrixXd increments; // m x d price increments
};

// Value, gradient and Hessian of g(theta) = ln sum_j exp(lw_j + theta.dS_j).
// The gradient equals the martingale defect sum_j q_j dS_j of the implied
// conditional probabilities q, which is what the exit tolerance controls.
struct Eval {
    double value = 0.0;
    Eigen::VectorXd grad;
    Eigen::MatrixXd hess;
    Eigen::VectorXd probs;
};

Eval evaluate(const NodeProblem& p, const Eigen::VectorXd& theta, bool second_order) {
    const Eigen::Index m = p.log_weight.size();
    const Eigen::Index d = p.increments.cols();
    Eigen::VectorXd a = p.log_weight + p.increments * theta;
    Eval e;
    e.value = log_sum_exp(a);
    e.probs = (a.array() - e.value).exp().matrix();
    e.grad = p.increments.transpose() * e.probs;
    if (second_order) {
        e.hess = Eigen::MatrixXd::Zero(d, d);
        for (Eigen::Index j = 0; j < m; ++j)
            e.hess += e.probs(j) * p.increments.row(j).transpose() * p.increments.row(j);
        e.hess -= e.grad * e.grad.transpose();
    }
    return e;
}

struct NodeResult {
    double log_value = 0.0;
    Eigen::VectorXd theta;
    Eigen::VectorXd probs;
    int iterations = 0;
    double exit_gradient = 0.0;
};

NodeResult minimize_node(const NodeProblem& p, Eigen::VectorXd theta,
                         const NewtonOptions& opt) {
    NodeResult r;
    Eval e = evaluate(p, theta, true);
    int iter = 0;
    // The gradient cannot resolve below curvature times the position's ulp;
    // widen the exit tolerance accordingly when the tilt pushes theta far out.
    const double incr = p.increments.size() ? p.increments.cwiseAbs().maxCoeff() : 0.0;
    auto exit_tol = [&](const Eigen::VectorXd& th) {
        const double floor = 64.0 * std::numeric_limits<double>::epsilon() * incr * incr *
                             (1.0 + th.lpNorm<Eigen::Infinity>());
        return std::max(opt.grad_tol, floor);
    };
    while (e.grad.lpNorm<Eigen::Infinity>() > exit_tol(theta)) {
        if (iter >= opt.max_iterations)
            raise(Errc::NewtonDivergence,
                  "per-node Newton exceeded " + std::to_string(opt.max_iterations) +
                      " iterations (gradient " + std::to_string(e.grad.norm()) + ")");
        ++iter;

        Eigen::MatrixXd h = e.hess;
        // The Hessian is a conditional covariance, hence PSD; a relative ridge
        // keeps the factorization stable when the tilt is extreme.
        const double ridge = 1e-14 * std::max(1.0, h.trace());
        h.diagonal().array() += ridge;
        Eigen::VectorXd dir = h.ldlt().solve(-e.grad);
        if (!dir.allFinite() || e.grad.dot(dir) >= 0.0) dir = -e.grad;

        double step = opt.initial_step;
        const double slope = e.grad.dot(dir);
        Eval trial;
        int halvings = 0;
        for (;;) {
            trial = evaluate(p, theta + step * dir, true);
            if (std::isfinite(trial.value) &&
                trial.value <= e.value + opt.armijo_slope * step * slope)
                break;
            // Endgame: the quadratic value improvement of a Newton step can
            // fall below one ulp of the value while the gradient is still
            // above tolerance. Accept the full step on gradient decrease.
            if (std::isfinite(trial.value) && step == opt.initial_step &&
                trial.grad.lpNorm<Eigen::Infinity>() <=
                    0.5 * e.grad.lpNorm<Eigen::Infinity>() &&
                trial.value <= e.value + 1e-14 * (1.0 + std::abs(e.value)))
                break;
            step *= opt.backtrack_factor;
            if (++halvings > 2000)
                raise(Errc::NewtonDivergence, "line search failed to make progress");
        }
        theta += step * dir;
        e = trial;
    }
    r.log_value = e.value;
    r.theta = std::move(theta);
    r.probs = e.probs;
    r.iterations = iter;
    r.exit_gradient = e.grad.lpNorm<Eigen::Infinity>();
    return r;
}

NodeProblem node_problem(const MarketTree& tree, int node_id,
                         const std::vector<double>& log_value) {
    const auto& n = tree.node(node_id);
    const Eigen::Index m = static_cast<Eigen::Index>(n.children.size());
    NodeProblem p;
    p.log_weight.resize(m);
    p.increments.resize(m, tree.num_assets());
    for (Eigen::Index j = 0; j < m; ++j) {
        const int c = n.children[static_cast<size_t>(j)];
        p.log_weight(j) = std::log(tree.node(c).cond_prob) + log_value[static_cast<size_t>(c)];
        p.increments.row(j) = tree.price_increment(node_id, static_cast<int>(j)).transpose();
    }
    return p;
}

} // namespace

TiltSolution solve_exponential_tilt(const MarketTree& tree,
                                    const std::vector<double>& leaf_exponent,
                                    const NewtonOptions& options) {
    if (leaf_exponent.size() != static_cast<size_t>(tree.num_leaves()))
        raise(Errc::ClaimTreeMismatch, "terminal exponent not shaped for tree");
    require_no_arbitrage(tree);
    if (options.start) check_strategy(tree, *options.start, "solve_exponential_tilt");

    TiltSolution sol;
    sol.log_value.assign(static_cast<size_t>(tree.num_nodes()), 0.0);
    sol.exponent_strategy = TradingStrategy::zeros(tree);
    sol.cond_probs.resize(static_cast<size_t>(tree.num_nodes()));

    for (int id : tree.leaves())
        sol.log_value[static_cast<size_t>(id)] =
            leaf_exponent[static_cast<size_t>(tree.leaf_index(id))];

    // Nodes in decreasing time so children are solved before parents.
    std::vector<int> order;
    order.reserve(static_cast<size_t>(tree.num_nodes()));
    for (const auto& n : tree.nodes())
        if (!n.children.empty()) order.push_back(n.id);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return tree.node(a).time > tree.node(b).time;
    });

    for (int id : order) {
        NodeProblem p = node_problem(tree, id, sol.log_value);
        Eigen::VectorXd theta0 = options.start
                                     ? options.start->positions[static_cast<size_t>(id)]
                                     : Eigen::VectorXd::Zero(tree.num_assets());
        NodeResult r;
        try {
            r = minimize_node(p, theta0, options);
        } catch (const Error&) {
            // A very large tilt flattens the problem far from its optimum.
            // Walk the exponent up in powers of two to a spread Newton handles
            // comfortably, warm-starting each stage with the previous stage's
            // position rescaled alongside the tilt.
            const double spread =
                p.log_weight.maxCoeff() - p.log_weight.minCoeff();
            int stages = 1;
            while (spread / std::pow(2.0, stages) > 64.0 && stages < 60) ++stages;
            Eigen::VectorXd warm = theta0 / std::pow(2.0, stages);
            for (int stage = stages; stage >= 0; --stage) {
                NodeProblem staged = p;
                staged.log_weight /= std::pow(2.0, stage);
                r = minimize_node(staged, warm, options);
                warm = (stage > 0) ? Eigen::VectorXd(2.0 * r.theta) : r.theta;
            }
        }
        sol.log_value[static_cast<size_t>(id)] = r.log_value;
        sol.exponent_strategy.positions[static_cast<size_t>(id)] = r.theta;
        sol.cond_probs[static_cast<size_t>(id)] =
            std::vector<double>(r.probs.data(), r.probs.data() + r.probs.size());
        sol.total_iterations += r.iterations;
        sol.max_exit_gradient = std::max(sol.max_exit_gradient, r.exit_gradient);
    }
    return sol;
}

std::vector<Eigen::VectorXd> node_polytope_vertices(const MarketTree& tree, int node_id) {
    const auto& n = tree.node(node_id);
    const int m = static_cast<int>(n.children.size());
    const int d = tree.num_assets();
    if (m == 0) raise(Errc::SchemaViolation, "polytope requested at a leaf");

    // Constraints A q = b with A = [1^T; dS^T], b = (1, 0, ..., 0).
    Eigen::MatrixXd A(d + 1, m);
    for (int j = 0; j < m; ++j) {
        A(0, j) = 1.0;
        A.block(1, j, d, 1) = tree.price_increment(node_id, j);
    }
    Eigen::VectorXd b = Eigen::VectorXd::Zero(d + 1);
    b(0) = 1.0;

    Eigen::FullPivLU<Eigen::MatrixXd> full(A);
    full.setThreshold(1e-12);
    const int rank = static_cast<int>(full.rank());

    std::vector<Eigen::VectorXd> vertices;
    // Enumerate all column subsets of size `rank`; each consistent nonnegative
    // basic solution is a polytope vertex.
    std::vector<int> idx(static_cast<size_t>(rank));
    for (int i = 0; i < rank; ++i) idx[static_cast<size_t>(i)] = i;
    for (;;) {
        Eigen::MatrixXd sub(d + 1, rank);
        for (int i = 0; i < rank; ++i) sub.col(i) = A.col(idx[static_cast<size_t>(i)]);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(sub);
        lu.setThreshold(1e-12);
        if (lu.rank() == rank) {
            Eigen::VectorXd x = lu.solve(b);
            if ((sub * x - b).lpNorm<Eigen::Infinity>() <= 1e-10 && (x.array() >= -1e-12).all()) {
                Eigen::VectorXd q = Eigen::VectorXd::Zero(m);
                for (int i = 0; i < rank; ++i)
                    q(idx[static_cast<size_t>(i)]) = std::max(0.0, x(i));
                bool dup = false;
                for (const auto& v : vertices)
                    if ((v - q).lpNorm<Eigen::Infinity>() <= 1e-10) {
                        dup = true;
                        break;
                    }
                if (!dup) vertices.push_back(std::move(q));
            }
        }
        // next combination
        int i = rank - 1;
        while (i >= 0 && idx[static_cast<size_t>(i)] == m - rank + i) --i;
        if (i < 0) break;
        ++idx[static_cast<size_t>(i)];
        for (int k = i + 1; k < rank; ++k)
            idx[static_cast<size_t>(k)] = idx[static_cast<size_t>(k - 1)] + 1;
    }
    return vertices;
}

void require_no_arbitrage(const MarketTree& tree) {
    for (const auto& n : tree.nodes()) {
        if (n.children.empty()) continue;
        const auto vertices = node_polytope_vertices(tree, n.id);
        if (vertices.empty())
            raise(Errc::NoMartingaleMeasure,
                  "one-step martingale polytope empty at node " + std::to_string(n.id));
        // A strictly positive measure exists iff the union of vertex supports
        // covers every child.
        Eigen::VectorXd mx = vertices.front();
        for (const auto& v : vertices) mx = mx.cwiseMax(v);
        if ((mx.array() <= 1e-12).any())
            raise(Errc::NoMartingaleMeasure,
                  "no strictly positive martingale measure at node " + std::to_string(n.id));
    }
}

} // namespace entropic
