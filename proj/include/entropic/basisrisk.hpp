#pragma once

#include <utility>
#include <vector>

#include "entropic/errors.hpp"

namespace entropic {

/// Lognormal traded asset plus a correlated Gaussian non-traded factor with
/// constant coefficients; payoffs written on the terminal factor value admit
/// closed-form exponential indifference prices.
struct BasisRiskModel {
    double mu = 0.0;    ///< traded drift
    double sigma = 0.2; ///< traded volatility, > 0
    double b = 0.0;     ///< factor drift
    double a = 0.3;     ///< factor volatility, > 0
    double rho = 0.0;   ///< correlation, |rho| < 1
    double y0 = 0.0;    ///< initial factor value
    double horizon = 1.0;

    void validate() const;
    double sharpe() const { return mu / sigma; }
};

/// Bounded payoff of the terminal factor: piecewise-linear on a sorted grid,
/// clamped to the end values outside the grid.
class PayoffFn {
  public:
    PayoffFn() = default;
    PayoffFn(std::vector<double> grid, std::vector<double> values);

    double operator()(double y) const;
    double sup_norm() const;
    double max_value() const;
    const std::vector<double>& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    bool empty() const { return grid_.empty(); }

    static PayoffFn constant(double k) { return PayoffFn({0.0, 1.0}, {k, k}); }
    /// Pointwise combination s1*f + s2*g on the merged grid (exact for
    /// piecewise-linear inputs).
    static PayoffFn combine(double s1, const PayoffFn& f, double s2, const PayoffFn& g);

  private:
    std::vector<double> grid_;
    std::vector<double> values_;
};

/// Law of the terminal factor under the minimal-entropy martingale measure:
/// Gaussian with mean y0 + bT - rho*a*lambda*T and variance a^2 T.
std::pair<double, double> q0_law(const BasisRiskModel& model);

/// Writer price of g(Y_T): ln E^{Q0}[exp(gamma (1-rho^2) g)] / (gamma (1-rho^2)),
/// evaluated by Gauss-Hermite quadrature (64 nodes); doubling to 128 nodes
/// must move the result by less than 1e-8 or the call fails loudly.
double closed_form_price(const BasisRiskModel& model, double gamma, const PayoffFn& g);

/// Conditional price with factor-written endowment:
/// nu_w(B | E) = nu_w(B - E) - nu_w(-E).
double conditional_price(const BasisRiskModel& model, double gamma, const PayoffFn& g_endow,
                         const PayoffFn& g_claim);

struct BasisRiskAgent {
    double gamma = 1.0;
    PayoffFn endowment; ///< empty payoff means zero endowment
};

/// Quadrature evaluation of the closed-form agreement inequality between the
/// two agents for claim g; equivalent to nonemptiness of the conditional
/// price interval.
bool agreement_check(const BasisRiskModel& model, const BasisRiskAgent& agent1,
                     const BasisRiskAgent& agent2, const PayoffFn& g);

struct GammaProfile {
    std::vector<std::pair<double, double>> values; ///< (gamma, f(gamma))
    double f_zero = 0.0; ///< limit at 0+, E[ln X1] - E[ln X2]
    double f_inf = 0.0;  ///< limit at infinity, ln||X1|| - ln||X2||
};

/// f(gamma) = (ln E[X1^gamma] - ln E[X2^gamma]) / gamma for strictly positive
/// bounded payoffs of the Q0 factor; the vehicle for the risk-aversion
/// non-monotonicity example.
GammaProfile gamma_profile(const BasisRiskModel& model, const PayoffFn& x1, const PayoffFn& x2,
                           const std::vector<double>& gammas);

/// ln E[exp(c . g(Y))] for Y Gaussian, by Gauss-Hermite with n nodes.
double log_exp_moment(const PayoffFn& g, double c, double mean, double variance, int n);

} // namespace entropic
