#include "entropic/market.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace entropic {

MarketTree MarketTree::build(const std::vector<TreeNodeSpec>& specs) {
    if (specs.empty()) raise(Errc::DanglingNode, "empty tree description");

    std::map<int, TreeNodeSpec> by_id;
    for (const auto& s : specs) {
        if (s.id < 0) raise(Errc::SchemaViolation, "node id must be nonnegative");
        if (!by_id.emplace(s.id, s).second)
            raise(Errc::SchemaViolation, "duplicate node id " + std::to_string(s.id));
    }

    // Contiguous ids keep node lookups index-based.
    int next = 0;
    for (const auto& [id, s] : by_id) {
        if (id != next++)
            raise(Errc::SchemaViolation, "node ids must be contiguous from 0, missing " +
                                             std::to_string(next - 1));
    }

    MarketTree tree;
    tree.nodes_.resize(by_id.size());
    int root = -1;
    for (const auto& [id, s] : by_id) {
        TreeNode n;
        n.id = id;
        n.parent = s.parent.value_or(-1);
        n.cond_prob = s.prob;
        n.prices = s.prices;
        if (n.parent < 0) {
            if (root >= 0) raise(Errc::DanglingNode, "more than one root node");
            root = id;
            n.cond_prob = 1.0;
        } else {
            if (by_id.find(n.parent) == by_id.end())
                raise(Errc::DanglingNode,
                      "node " + std::to_string(id) + " references missing parent " +
                          std::to_string(n.parent));
        }
        tree.nodes_[static_cast<size_t>(id)] = std::move(n);
    }
    if (root < 0) raise(Errc::DanglingNode, "no root node");
    tree.root_ = root;

    const size_t dim = tree.nodes_[static_cast<size_t>(root)].prices.size();
    if (dim < 1) raise(Errc::SchemaViolation, "price vector must include the numeraire");
    if (dim > static_cast<size_t>(kMaxAssets) + 1)
        raise(Errc::SchemaViolation, "at most " + std::to_string(kMaxAssets) + " risky assets");
    tree.num_assets_ = static_cast<int>(dim) - 1;

    for (auto& n : tree.nodes_) {
        if (n.prices.size() != dim)
            raise(Errc::DimensionMismatch, "inconsistent price dimension at node " +
                                               std::to_string(n.id));
        for (double p : n.prices)
            if (!std::isfinite(p))
                raise(Errc::SchemaViolation, "non-finite price at node " + std::to_string(n.id));
        if (n.prices[0] != 1.0)
            raise(Errc::NumeraireNotOne, "asset 0 must be identically 1, node " +
                                             std::to_string(n.id));
        if (n.id != root) {
            if (!(n.cond_prob > 0.0) || !std::isfinite(n.cond_prob))
                raise(Errc::NonPositiveProbability, "branch probability at node " +
                                                        std::to_string(n.id));
            if (n.cond_prob > 1.0 + 1e-12)
                raise(Errc::NonPositiveProbability, "branch probability exceeds 1 at node " +
                                                        std::to_string(n.id));
            tree.nodes_[static_cast<size_t>(n.parent)].children.push_back(n.id);
        }
    }

    // Times from the root; children are kept in increasing id order so the
    // depth-first leaf order below is well defined.
    tree.nodes_[static_cast<size_t>(root)].time = 0;
    tree.path_prob_.assign(tree.nodes_.size(), 0.0);
    tree.path_prob_[static_cast<size_t>(root)] = 1.0;
    std::vector<int> stack{root};
    std::vector<bool> seen(tree.nodes_.size(), false);
    seen[static_cast<size_t>(root)] = true;
    int reached = 0;
    while (!stack.empty()) {
        int id = stack.back();
        stack.pop_back();
        ++reached;
        auto& n = tree.nodes_[static_cast<size_t>(id)];
        std::sort(n.children.begin(), n.children.end());
        if (!n.children.empty()) {
            if (n.children.size() < 2)
                raise(Errc::SchemaViolation, "non-terminal node " + std::to_string(id) +
                                                 " must branch at least 2 ways");
            if (n.children.size() > static_cast<size_t>(kMaxBranching))
                raise(Errc::SchemaViolation, "branching factor capped at " +
                                                 std::to_string(kMaxBranching));
            double sum = 0.0;
            for (int c : n.children) {
                auto& ch = tree.nodes_[static_cast<size_t>(c)];
                ch.time = n.time + 1;
                tree.path_prob_[static_cast<size_t>(c)] =
                    tree.path_prob_[static_cast<size_t>(id)] * ch.cond_prob;
                sum += ch.cond_prob;
                if (seen[static_cast<size_t>(c)])
                    raise(Errc::DanglingNode, "node " + std::to_string(c) + " reached twice");
                seen[static_cast<size_t>(c)] = true;
                stack.push_back(c);
            }
            if (std::abs(sum - 1.0) > 1e-12)
                raise(Errc::ProbabilitySumMismatch,
                      "children of node " + std::to_string(id) + " sum to " +
                          std::to_string(sum));
        }
    }
    if (reached != tree.num_nodes())
        raise(Errc::DanglingNode, "tree has nodes unreachable from the root");

    tree.horizon_ = 0;
    for (const auto& n : tree.nodes_) tree.horizon_ = std::max(tree.horizon_, n.time);
    if (tree.horizon_ < 1) raise(Errc::SchemaViolation, "horizon must be at least 1 period");
    for (const auto& n : tree.nodes_)
        if (n.children.empty() && n.time != tree.horizon_)
            raise(Errc::DanglingNode, "leaf " + std::to_string(n.id) +
                                          " does not sit at the terminal date");

    // Normative leaf order: depth-first, children in increasing id order.
    tree.leaf_index_.assign(tree.nodes_.size(), -1);
    std::vector<int> dfs{root};
    while (!dfs.empty()) {
        int id = dfs.back();
        dfs.pop_back();
        const auto& n = tree.nodes_[static_cast<size_t>(id)];
        if (n.children.empty()) {
            tree.leaf_index_[static_cast<size_t>(id)] = static_cast<int>(tree.leaves_.size());
            tree.leaves_.push_back(id);
        } else {
            for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) dfs.push_back(*it);
        }
    }
    return tree;
}

std::vector<double> MarketTree::leaf_probabilities() const {
    std::vector<double> p;
    p.reserve(leaves_.size());
    for (int id : leaves_) p.push_back(path_prob_[static_cast<size_t>(id)]);
    return p;
}

Eigen::VectorXd MarketTree::price_increment(int id, int k) const {
    const auto& n = nodes_[static_cast<size_t>(id)];
    const auto& c = nodes_[static_cast<size_t>(n.children[static_cast<size_t>(k)])];
    Eigen::VectorXd d(num_assets_);
    for (int a = 0; a < num_assets_; ++a)
        d(a) = c.prices[static_cast<size_t>(a) + 1] - n.prices[static_cast<size_t>(a) + 1];
    return d;
}

bool MarketTree::same_shape(const MarketTree& other) const {
    if (num_nodes() != other.num_nodes() || num_assets_ != other.num_assets_) return false;
    for (int i = 0; i < num_nodes(); ++i) {
        if (nodes_[static_cast<size_t>(i)].parent != other.nodes_[static_cast<size_t>(i)].parent)
            return false;
    }
    return true;
}

double Claim::sup_norm() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

Claim operator+(const Claim& a, const Claim& b) {
    if (a.size() != b.size()) raise(Errc::DimensionMismatch, "claim sizes differ");
    Claim r = a;
    for (int i = 0; i < r.size(); ++i) r[i] += b[i];
    return r;
}

Claim operator-(const Claim& a, const Claim& b) {
    if (a.size() != b.size()) raise(Errc::DimensionMismatch, "claim sizes differ");
    Claim r = a;
    for (int i = 0; i < r.size(); ++i) r[i] -= b[i];
    return r;
}

Claim operator-(const Claim& a) {
    Claim r = a;
    for (auto& v : r.values) v = -v;
    return r;
}

Claim operator*(double s, const Claim& a) {
    Claim r = a;
    for (auto& v : r.values) v *= s;
    return r;
}

Claim operator+(const Claim& a, double k) {
    Claim r = a;
    for (auto& v : r.values) v += k;
    return r;
}

Claim operator-(const Claim& a, double k) { return a + (-k); }

TradingStrategy TradingStrategy::zeros(const MarketTree& tree) {
    TradingStrategy s;
    s.positions.resize(static_cast<size_t>(tree.num_nodes()));
    for (const auto& n : tree.nodes())
        if (!n.children.empty())
            s.positions[static_cast<size_t>(n.id)] = Eigen::VectorXd::Zero(tree.num_assets());
    return s;
}

TradingStrategy& TradingStrategy::operator+=(const TradingStrategy& other) {
    if (positions.size() != other.positions.size())
        raise(Errc::StrategyTreeMismatch, "strategy sizes differ");
    for (size_t i = 0; i < positions.size(); ++i) {
        if (positions[i].size() == 0) continue;
        positions[i] += other.positions[i];
    }
    return *this;
}

TradingStrategy& TradingStrategy::operator-=(const TradingStrategy& other) {
    if (positions.size() != other.positions.size())
        raise(Errc::StrategyTreeMismatch, "strategy sizes differ");
    for (size_t i = 0; i < positions.size(); ++i) {
        if (positions[i].size() == 0) continue;
        positions[i] -= other.positions[i];
    }
    return *this;
}

TradingStrategy& TradingStrategy::operator*=(double s) {
    for (auto& p : positions)
        if (p.size() > 0) p *= s;
    return *this;
}

TradingStrategy operator+(TradingStrategy a, const TradingStrategy& b) { return a += b; }
TradingStrategy operator-(TradingStrategy a, const TradingStrategy& b) { return a -= b; }
TradingStrategy operator*(double s, TradingStrategy a) { return a *= s; }

void check_claim(const MarketTree& tree, const Claim& c, const char* where) {
    if (c.size() != tree.num_leaves())
        raise(Errc::ClaimTreeMismatch, std::string(where) + ": claim has " +
                                           std::to_string(c.size()) + " values, tree has " +
                                           std::to_string(tree.num_leaves()) + " leaves");
    for (double v : c.values)
        if (!std::isfinite(v)) raise(Errc::ClaimTreeMismatch, std::string(where) +
                                                                   ": non-finite claim value");
}

void check_strategy(const MarketTree& tree, const TradingStrategy& s, const char* where) {
    if (s.positions.size() != static_cast<size_t>(tree.num_nodes()))
        raise(Errc::StrategyTreeMismatch, std::string(where) + ": strategy not shaped for tree");
    for (const auto& n : tree.nodes()) {
        const auto& p = s.positions[static_cast<size_t>(n.id)];
        if (n.children.empty()) {
            if (p.size() != 0)
                raise(Errc::StrategyTreeMismatch, std::string(where) + ": position at a leaf");
        } else if (p.size() != tree.num_assets()) {
            raise(Errc::StrategyTreeMismatch, std::string(where) +
                                                  ": missing position at node " +
                                                  std::to_string(n.id));
        } else if (!p.allFinite()) {
            raise(Errc::StrategyTreeMismatch, std::string(where) + ": non-finite position");
        }
    }
}

Claim terminal_gains(const MarketTree& tree, const TradingStrategy& strategy) {
    check_strategy(tree, strategy, "terminal_gains");
    std::vector<double> acc(static_cast<size_t>(tree.num_nodes()), 0.0);
    Claim out = Claim::zeros(tree.num_leaves());
    for (const auto& n : tree.nodes()) {
        for (size_t k = 0; k < n.children.size(); ++k) {
            const int child = n.children[k];
            const double step =
                strategy.positions[static_cast<size_t>(n.id)].dot(
                    tree.price_increment(n.id, static_cast<int>(k)));
            acc[static_cast<size_t>(child)] = acc[static_cast<size_t>(n.id)] + step;
        }
        if (n.children.empty()) out[tree.leaf_index(n.id)] = acc[static_cast<size_t>(n.id)];
    }
    return out;
}

TradingStrategy GainsBasis::to_strategy(const MarketTree& tree,
                                        const Eigen::VectorXd& coeffs) const {
    if (coeffs.size() != static_cast<Eigen::Index>(ids.size()))
        raise(Errc::DimensionMismatch, "gains coefficients do not match basis");
    TradingStrategy s = TradingStrategy::zeros(tree);
    for (size_t j = 0; j < ids.size(); ++j) {
        const auto [node, asset] = ids[j];
        s.positions[static_cast<size_t>(node)](asset) += coeffs(static_cast<Eigen::Index>(j));
    }
    return s;
}

GainsBasis replication_basis(const MarketTree& tree) {
    const int L = tree.num_leaves();
    std::vector<Eigen::VectorXd> cols;
    std::vector<std::pair<int, int>> ids;
    for (const auto& n : tree.nodes()) {
        if (n.children.empty()) continue;
        for (int a = 0; a < tree.num_assets(); ++a) {
            Eigen::VectorXd col = Eigen::VectorXd::Zero(L);
            bool nonzero = false;
            for (size_t k = 0; k < n.children.size(); ++k) {
                const double d = tree.price_increment(n.id, static_cast<int>(k))(a);
                if (d == 0.0) continue;
                // every leaf below this child picks up the one-step increment
                std::vector<int> stack{n.children[k]};
                while (!stack.empty()) {
                    int id = stack.back();
                    stack.pop_back();
                    const auto& m = tree.node(id);
                    if (m.children.empty()) {
                        col(tree.leaf_index(id)) += d;
                        nonzero = true;
                    } else {
                        for (int c : m.children) stack.push_back(c);
                    }
                }
            }
            if (nonzero) {
                cols.push_back(std::move(col));
                ids.emplace_back(n.id, a);
            }
        }
    }
    GainsBasis basis;
    basis.columns.resize(L, 1 + static_cast<Eigen::Index>(cols.size()));
    basis.columns.col(0).setOnes();
    for (size_t j = 0; j < cols.size(); ++j)
        basis.columns.col(1 + static_cast<Eigen::Index>(j)) = cols[j];
    basis.ids = std::move(ids);
    return basis;
}

std::optional<Replication> replicate(const MarketTree& tree, const Claim& claim, double tol) {
    check_claim(tree, claim, "replicate");
    const GainsBasis basis = replication_basis(tree);
    Eigen::VectorXd b(claim.size());
    for (int i = 0; i < claim.size(); ++i) b(i) = claim[i];

    Eigen::VectorXd x = basis.columns.colPivHouseholderQr().solve(b);
    const double resid = (basis.columns * x - b).lpNorm<Eigen::Infinity>();
    if (resid > tol * (1.0 + claim.sup_norm())) return std::nullopt;

    Replication rep;
    rep.cost = x(0);
    rep.strategy = basis.to_strategy(tree, x.tail(x.size() - 1));
    return rep;
}

bool risk_equivalent(const MarketTree& tree, const Claim& c1, const Claim& c2, double tol) {
    check_claim(tree, c1, "risk_equivalent");
    check_claim(tree, c2, "risk_equivalent");
    return replicate(tree, c1 - c2, tol).has_value();
}

} // namespace entropic
