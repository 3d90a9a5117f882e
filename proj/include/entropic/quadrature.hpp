#pragma once

#include <vector>

namespace entropic {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss-Hermite rule for integral over R of f(x) exp(-x^2) dx. Nodes and
/// weights come from the Golub-Welsch eigenvalue construction and are cached;
/// callers share them read-only.
const QuadratureRule& gauss_hermite(int n);

} // namespace entropic
