#pragma once

#include <vector>

#include "lossav/grid.hpp"
#include "lossav/model2.hpp"
#include "lossav/preferences.hpp"
#include "lossav/processes.hpp"
#include "lossav/quadrature.hpp"

namespace lossav {

struct SolverOptions {
    double tol = 1e-10;
    int max_iter = 10000;
    bool auto_widen = true;           // widen log Y span when clamped mass is too large
    int max_widen = 2;
    double clamp_mass_limit = 1e-3;
};

struct HSolution {
    GridFunction h;
    int iterations = 0;
    double final_residual = 0.0;
    double contraction_ratio_estimate = 0.0;  // geometric mean of the last ratios
    double max_contraction_ratio = 0.0;       // worst successive ratio after the first step
    std::size_t clamp_count = 0;              // clamped interpolations in the last sweep
    std::size_t evaluations = 0;
    double clamped_mass = 0.0;                // stationary-weighted clamped quadrature mass
    int widenings = 0;
    double tol = 0.0;
    std::vector<double> residual_history;
};

// The integral operator whose fixed point is h. At state (eps, logy):
//   (T h) = gamma Gamma(F(eps)) beta Y A(logy) + beta B(logy)
//   A = E_t[eps'^(1-theta) (L'c + h') / (Y'L'c + h')]
//   B = E_t[eps'^(1-theta) (Y/Y') (h' + L'c)]
// with c = 1 - beta E[eps^(1-theta)], L' = Lambda(F(eps')), h' by bilinear interpolation.
class HOperator {
public:
    HOperator(const PreferenceParams& prefs, const ProcessParams& p, QuadratureRule rule);

    struct Parts {
        double A = 0.0;
        double B = 0.0;
        double C = 0.0;  // E_t[eps'^-theta Y' L' / (Y'L'c + h')], enters R_f
    };
    Parts parts(const GridFunction& h, double logy, ClampCounter* counter = nullptr) const;
    double combine(const Parts& q, double eps, double logy) const;

    GridFunction apply(const GridFunction& h, ClampCounter* counter = nullptr) const;
    // value of T h at any state
    double evaluate(const GridFunction& h, double eps, double logy) const;
    // stationary-weighted probability mass of quadrature points falling off the grid
    double clamped_mass(const Grid2D& g) const;

    double c() const { return c_; }
    double weight(double eps) const;  // Lambda(F(eps))
    double prosp(double eps) const;   // Gamma(F(eps))
    const PreferenceParams& prefs() const { return prefs_; }
    const ProcessParams& process() const { return p_; }
    const QuadratureRule& rule() const { return rule_; }

    struct Node {
        double eps, w, lam, pw1, pw0;  // eps', weight, Lambda', eps'^(1-theta), eps'^-theta
    };
    const std::vector<Node>& eps_nodes() const { return nodes_; }

private:
    PreferenceParams prefs_;
    ProcessParams p_;
    QuadratureRule rule_;
    double c_;
    std::vector<Node> nodes_;
};

GridFunction t_operator(const PreferenceParams& prefs, const ProcessParams& p,
                        const QuadratureRule& rule, const GridFunction& h);

HSolution solve_h(const PreferenceParams& prefs, const ProcessParams& p, const QuadratureRule& rule,
                  const Grid2D& grid, const SolverOptions& opts = {});

// c * sum_k a^(k-1) beta E[eps^(1-theta) Lambda] E_t[Y_t/Y_{t+k}], a = beta E[eps^(1-theta)];
// the gamma = 0 fixed point in closed form
double h_gamma0_series(const PreferenceParams& prefs, const ProcessParams& p,
                       const QuadratureRule& rule, double logy);

class Model1 {
public:
    Model1(const PreferenceParams& prefs, const ProcessParams& p, QuadratureRule rule, HSolution sol);

    const HSolution& solution() const { return sol_; }
    const HOperator& op() const { return op_; }
    double c() const { return op_.c(); }

    // h at the current state: stored value at grid nodes, one operator application elsewhere
    double h_at(double eps, double logy) const;
    double h_next(double eps, double logy) const;  // bilinear, clamped

    EquilibriumPrices price(const MarketState& s) const;
    double risk_free(double eps, double logy) const;
    double pd(double eps, double logy) const;
    double stock_return(const MarketState& s, double eps_next, double logy_next) const;
    double sdf(double eps_now, double eps_next, double logy_next) const;
    EulerResiduals euler_residuals(const MarketState& s) const;
    // same residuals with a caller-supplied h surface (sensitivity checks)
    EulerResiduals euler_residuals_with(const MarketState& s, const GridFunction& h) const;

    double cw_ratio(const MarketState& s) const;
    double cw_term1(const MarketState& s) const;
    double cw_term2_integrand(const MarketState& s, double eps_next, double logy_next) const;
    // two-period form with h(eps_{t+2}, Y_{t+2}) and (1 - beta E[eps^-theta]); diagnostic only
    double cw_ratio_printed(const MarketState& s) const;

    struct LowerBound {
        double value = 0.0;
        bool degenerate = false;  // gamma = 0: the equation does not involve the bound
        bool bracketed = true;
        double residual = 0.0;
    };
    LowerBound h_lower_bound(const MarketState& s) const;
    double lower_bound_expectation(const MarketState& s, double hl) const;

    // rf, pd at a state with one quadrature sweep (simulation hot path)
    void rf_pd(double eps, double logy, double& rf, double& pd) const;

private:
    PreferenceParams prefs_;
    ProcessParams p_;
    HOperator op_;
    HSolution sol_;
    double el0_;  // E[eps^-theta Lambda]
};

// cw ratio with b = gamma = 0 from the closed-form reduction (AR(1) law for Y_{t+1})
double cw_ratio_no_gain_loss(const PreferenceParams& prefs, const ProcessParams& p,
                             const QuadratureRule& rule, const MarketState& s);

double sdf1(const Model1& m, double eps_now, double eps_next, double logy_next);

}  // namespace lossav
