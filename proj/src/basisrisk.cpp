#include "entropic/basisrisk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "entropic/quadrature.hpp"

namespace entropic {

void BasisRiskModel::validate() const {
    if (!(sigma > 0.0)) raise(Errc::SchemaViolation, "sigma must be positive");
    if (!(a > 0.0)) raise(Errc::SchemaViolation, "factor volatility must be positive");
    if (!(std::abs(rho) < 1.0)) raise(Errc::SchemaViolation, "|rho| must be below 1");
    if (!(horizon > 0.0)) raise(Errc::SchemaViolation, "horizon must be positive");
    if (!std::isfinite(mu) || !std::isfinite(b) || !std::isfinite(y0))
        raise(Errc::SchemaViolation, "model coefficients must be finite");
}

PayoffFn::PayoffFn(std::vector<double> grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (grid_.size() != values_.size() || grid_.size() < 2)
        raise(Errc::SchemaViolation, "payoff table needs matching grid/value arrays, size >= 2");
    for (size_t i = 0; i + 1 < grid_.size(); ++i)
        if (!(grid_[i] < grid_[i + 1]))
            raise(Errc::SchemaViolation, "payoff grid must be strictly increasing");
    for (double v : values_)
        if (!std::isfinite(v)) raise(Errc::SchemaViolation, "payoff values must be finite");
}

double PayoffFn::operator()(double y) const {
    if (grid_.empty()) return 0.0;
    if (y <= grid_.front()) return values_.front();
    if (y >= grid_.back()) return values_.back();
    const auto it = std::upper_bound(grid_.begin(), grid_.end(), y);
    const size_t hi = static_cast<size_t>(it - grid_.begin());
    const size_t lo = hi - 1;
    const double t = (y - grid_[lo]) / (grid_[hi] - grid_[lo]);
    return values_[lo] + t * (values_[hi] - values_[lo]);
}

double PayoffFn::sup_norm() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

double PayoffFn::max_value() const {
    double m = values_.empty() ? 0.0 : values_.front();
    for (double v : values_) m = std::max(m, v);
    return m;
}

PayoffFn PayoffFn::combine(double s1, const PayoffFn& f, double s2, const PayoffFn& g) {
    std::vector<double> merged;
    merged.reserve(f.grid_.size() + g.grid_.size());
    std::merge(f.grid_.begin(), f.grid_.end(), g.grid_.begin(), g.grid_.end(),
               std::back_inserter(merged));
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
    std::vector<double> values;
    values.reserve(merged.size());
    for (double y : merged) values.push_back(s1 * f(y) + s2 * g(y));
    return PayoffFn(std::move(merged), std::move(values));
}

std::pair<double, double> q0_law(const BasisRiskModel& model) {
    model.validate();
    const double t = model.horizon;
    // Girsanov removes the Sharpe-ratio drift from the traded Brownian leg.
    const double mean = model.y0 + model.b * t - model.rho * model.a * model.sharpe() * t;
    const double variance = model.a * model.a * t;
    return {mean, variance};
}

double log_exp_moment(const PayoffFn& g, double c, double mean, double variance, int n) {
    const QuadratureRule& rule = gauss_hermite(n);
    const double s = std::sqrt(2.0 * variance);
    // log-sum-exp over quadrature nodes, safe for large c * g.
    double m = -std::numeric_limits<double>::infinity();
    std::vector<double> expo(rule.nodes.size());
    for (size_t i = 0; i < rule.nodes.size(); ++i) {
        expo[i] = c * g(mean + s * rule.nodes[i]);
        m = std::max(m, expo[i]);
    }
    double sum = 0.0;
    for (size_t i = 0; i < rule.nodes.size(); ++i)
        sum += rule.weights[i] * std::exp(expo[i] - m);
    return m + std::log(sum / std::sqrt(M_PI));
}

namespace {

constexpr int kQuadratureNodes = 64;

double converged_log_exp_moment(const PayoffFn& g, double c, double mean, double variance) {
    const double v64 = log_exp_moment(g, c, mean, variance, kQuadratureNodes);
    const double v128 = log_exp_moment(g, c, mean, variance, 2 * kQuadratureNodes);
    if (std::abs(v128 - v64) >= 1e-8)
        raise(Errc::QuadratureNotConverged,
              "node doubling moved the expectation by " + std::to_string(std::abs(v128 - v64)));
    return v64;
}

} // namespace

double closed_form_price(const BasisRiskModel& model, double gamma, const PayoffFn& g) {
    model.validate();
    if (!(gamma > 0.0)) raise(Errc::GammaOutOfRange, "gamma must be positive");
    if (g.empty()) return 0.0;
    const auto [mean, variance] = q0_law(model);
    const double c = gamma * (1.0 - model.rho * model.rho);
    return converged_log_exp_moment(g, c, mean, variance) / c;
}

double conditional_price(const BasisRiskModel& model, double gamma, const PayoffFn& g_endow,
                         const PayoffFn& g_claim) {
    const PayoffFn endow = g_endow.empty() ? PayoffFn::constant(0.0) : g_endow;
    const PayoffFn net = PayoffFn::combine(1.0, g_claim, -1.0, endow);
    const PayoffFn short_endow = PayoffFn::combine(-1.0, endow, 0.0, PayoffFn::constant(0.0));
    return closed_form_price(model, gamma, net) - closed_form_price(model, gamma, short_endow);
}

bool agreement_check(const BasisRiskModel& model, const BasisRiskAgent& agent1,
                     const BasisRiskAgent& agent2, const PayoffFn& g) {
    model.validate();
    if (!(agent1.gamma > 0.0) || !(agent2.gamma > 0.0))
        raise(Errc::GammaOutOfRange, "gamma must be positive");
    const auto [mean, variance] = q0_law(model);
    const double r2 = 1.0 - model.rho * model.rho;
    const PayoffFn zero = PayoffFn::constant(0.0);
    const PayoffFn& e1 = agent1.endowment.empty() ? zero : agent1.endowment;
    const PayoffFn& e2 = agent2.endowment.empty() ? zero : agent2.endowment;
    const double g1 = agent1.gamma;
    const double g2 = agent2.gamma;

    // Tilde quantities carry the (1-rho^2) scaling; the whole inequality is
    // evaluated in logs. "B tilde minus E1 tilde" etc. are single payoffs so
    // each side is one quadrature pass.
    const PayoffFn b_minus_e1 = PayoffFn::combine(1.0, g, -1.0, e1);
    const double lhs =
        (g2 / g1) * (log_exp_moment(b_minus_e1, g1 * r2, mean, variance, kQuadratureNodes) -
                     log_exp_moment(e1, -g1 * r2, mean, variance, kQuadratureNodes));
    const PayoffFn e2_plus_b = PayoffFn::combine(1.0, e2, 1.0, g);
    const double rhs =
        log_exp_moment(e2_plus_b, -g2 * r2, mean, variance, kQuadratureNodes) -
        log_exp_moment(e2, -g2 * r2, mean, variance, kQuadratureNodes);
    return lhs <= -rhs;
}

GammaProfile gamma_profile(const BasisRiskModel& model, const PayoffFn& x1, const PayoffFn& x2,
                           const std::vector<double>& gammas) {
    model.validate();
    if (x1.empty() || x2.empty()) raise(Errc::SchemaViolation, "profile payoffs must be set");
    auto positive = [](const PayoffFn& x) {
        for (double v : x.values())
            if (!(v > 0.0)) return false;
        return true;
    };
    if (!positive(x1) || !positive(x2))
        raise(Errc::SchemaViolation, "profile payoffs must be strictly positive");
    const auto [mean, variance] = q0_law(model);

    // ln X is what enters E[X^gamma] = E[exp(gamma ln X)]; build the log
    // tables once. The log of a piecewise-linear table is not piecewise
    // linear, so refine the grid to keep the interpolation error harmless.
    auto log_table = [](const PayoffFn& x) {
        std::vector<double> grid, vals;
        const auto& gy = x.grid();
        for (size_t i = 0; i + 1 < gy.size(); ++i) {
            const int refine = 8;
            for (int k = 0; k < refine; ++k) {
                const double y = gy[i] + (gy[i + 1] - gy[i]) * k / refine;
                grid.push_back(y);
                vals.push_back(std::log(x(y)));
            }
        }
        grid.push_back(gy.back());
        vals.push_back(std::log(x(gy.back())));
        return PayoffFn(std::move(grid), std::move(vals));
    };
    const PayoffFn lx1 = log_table(x1);
    const PayoffFn lx2 = log_table(x2);

    GammaProfile profile;
    for (double gamma : gammas) {
        if (!(gamma > 0.0)) raise(Errc::GammaOutOfRange, "profile gammas must be positive");
        const double f = (log_exp_moment(lx1, gamma, mean, variance, kQuadratureNodes) -
                          log_exp_moment(lx2, gamma, mean, variance, kQuadratureNodes)) /
                         gamma;
        profile.values.emplace_back(gamma, f);
    }
    // gamma -> 0 limit of (1/gamma) ln E[X^gamma] is E[ln X]; evaluated with
    // the same nodes for consistency with the finite-gamma values.
    const QuadratureRule& rule = gauss_hermite(kQuadratureNodes);
    const double s = std::sqrt(2.0 * variance);
    double m1 = 0.0, m2 = 0.0;
    for (size_t i = 0; i < rule.nodes.size(); ++i) {
        const double y = mean + s * rule.nodes[i];
        m1 += rule.weights[i] * lx1(y);
        m2 += rule.weights[i] * lx2(y);
    }
    profile.f_zero = (m1 - m2) / std::sqrt(M_PI);
    profile.f_inf = std::log(x1.max_value()) - std::log(x2.max_value());
    return profile;
}

} // namespace entropic
