#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "entropic/errors.hpp"

namespace entropic {

/// One node of the event tree. Prices include the numeraire in slot 0,
/// so `prices.size() == num_assets + 1`.
struct TreeNode {
    int id = -1;
    int time = 0;
    int parent = -1; ///< -1 for the root
    std::vector<int> children;
    double cond_prob = 1.0; ///< conditional probability given the parent
    std::vector<double> prices;
};

/// Input record for build_tree / the scenario file.
struct TreeNodeSpec {
    int id = -1;
    std::optional<int> parent;
    double prob = 1.0;
    std::vector<double> prices;
};

constexpr int kMaxBranching = 16;
constexpr int kMaxAssets = 4;

/// Finite event tree with strictly positive full-support reference measure P.
/// Immutable after construction; all engines treat it as shared read-only data.
///
/// Leaf order is normative: leaves are listed in depth-first order from the
/// root, visiting children in increasing id order. Claims are vectors in this
/// order.
class MarketTree {
  public:
    static MarketTree build(const std::vector<TreeNodeSpec>& specs);

    int num_nodes() const { return static_cast<int>(nodes_.size()); }
    int num_assets() const { return num_assets_; }
    int horizon() const { return horizon_; }
    const TreeNode& node(int id) const { return nodes_[static_cast<size_t>(id)]; }
    const std::vector<TreeNode>& nodes() const { return nodes_; }
    int root() const { return root_; }

    const std::vector<int>& leaves() const { return leaves_; }
    int num_leaves() const { return static_cast<int>(leaves_.size()); }
    /// Position of a leaf node in the normative leaf order, -1 for non-leaves.
    int leaf_index(int node_id) const { return leaf_index_[static_cast<size_t>(node_id)]; }

    /// Unconditional probability of reaching a node under P.
    double path_prob(int node_id) const { return path_prob_[static_cast<size_t>(node_id)]; }
    /// P as a vector over leaves, in leaf order.
    std::vector<double> leaf_probabilities() const;

    /// Risky price increment S_child - S_parent (numeraire dropped), as a
    /// d-vector for child `k` of node `id`.
    Eigen::VectorXd price_increment(int id, int k) const;

    bool same_shape(const MarketTree& other) const;

  private:
    std::vector<TreeNode> nodes_;
    std::vector<int> leaves_;
    std::vector<int> leaf_index_;
    std::vector<double> path_prob_;
    int root_ = 0;
    int horizon_ = 0;
    int num_assets_ = 0;
};

/// Terminal payoff: one value per leaf, in the tree's normative leaf order.
struct Claim {
    std::vector<double> values;

    Claim() = default;
    explicit Claim(std::vector<double> v) : values(std::move(v)) {}
    static Claim zeros(int n) { return Claim(std::vector<double>(static_cast<size_t>(n), 0.0)); }
    static Claim constant(int n, double k) {
        return Claim(std::vector<double>(static_cast<size_t>(n), k));
    }

    int size() const { return static_cast<int>(values.size()); }
    double operator[](int i) const { return values[static_cast<size_t>(i)]; }
    double& operator[](int i) { return values[static_cast<size_t>(i)]; }

    double sup_norm() const;
};

Claim operator+(const Claim& a, const Claim& b);
Claim operator-(const Claim& a, const Claim& b);
Claim operator-(const Claim& a);
Claim operator*(double s, const Claim& a);
Claim operator+(const Claim& a, double k);
Claim operator-(const Claim& a, double k);

/// Positions in the d risky assets at every non-terminal node.
/// `positions[id]` is empty for leaves.
struct TradingStrategy {
    std::vector<Eigen::VectorXd> positions;

    static TradingStrategy zeros(const MarketTree& tree);
    TradingStrategy& operator+=(const TradingStrategy& other);
    TradingStrategy& operator-=(const TradingStrategy& other);
    TradingStrategy& operator*=(double s);
};

TradingStrategy operator+(TradingStrategy a, const TradingStrategy& b);
TradingStrategy operator-(TradingStrategy a, const TradingStrategy& b);
TradingStrategy operator*(double s, TradingStrategy a);

void check_claim(const MarketTree& tree, const Claim& c, const char* where);
void check_strategy(const MarketTree& tree, const TradingStrategy& s, const char* where);

/// Terminal value of the gains process sum_path theta . (S_child - S_node).
Claim terminal_gains(const MarketTree& tree, const TradingStrategy& strategy);

struct Replication {
    double cost = 0.0;
    TradingStrategy strategy;
};

/// Terminal-gains design matrix: a constant column followed by one column per
/// (non-terminal node, asset) pair holding the gains of a one-step unit
/// position. Columns whose price increments vanish identically are dropped,
/// so an asset that does not move at a node contributes no basis direction.
struct GainsBasis {
    Eigen::MatrixXd columns;              ///< num_leaves x (1 + kept columns)
    std::vector<std::pair<int, int>> ids; ///< (node, asset) per kept gains column

    TradingStrategy to_strategy(const MarketTree& tree, const Eigen::VectorXd& coeffs) const;
};

GainsBasis replication_basis(const MarketTree& tree);

/// Least-squares test for membership in the replicable subspace
/// {c + gains(theta)}. Succeeds when the projection residual satisfies
/// ||B - c - gains(theta)||_inf <= tol * (1 + ||B||_inf).
std::optional<Replication> replicate(const MarketTree& tree, const Claim& claim,
                                     double tol = 1e-9);

/// Claims are risk equivalent when their difference is replicable.
bool risk_equivalent(const MarketTree& tree, const Claim& c1, const Claim& c2,
                     double tol = 1e-9);

} // namespace entropic
