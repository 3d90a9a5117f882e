#include "entropic/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include <Eigen/Dense>

namespace entropic {

namespace {

QuadratureRule build_gauss_hermite(int n) {
    // Jacobi matrix of the Hermite recurrence; eigenvalues are the nodes and
    // the first eigenvector components give the weights.
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) {
        const double b = std::sqrt(i / 2.0);
        jacobi(i, i - 1) = b;
        jacobi(i - 1, i) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
    const double mu0 = std::sqrt(M_PI);
    QuadratureRule rule;
    rule.nodes.resize(static_cast<size_t>(n));
    rule.weights.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        rule.nodes[static_cast<size_t>(i)] = eig.eigenvalues()(i);
        const double v = eig.eigenvectors()(0, i);
        rule.weights[static_cast<size_t>(i)] = mu0 * v * v;
    }
    return rule;
}

} // namespace

const QuadratureRule& gauss_hermite(int n) {
    static std::mutex mu;
    static std::map<int, QuadratureRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build_gauss_hermite(n)).first;
    return it->second;
}

} // namespace entropic
