#pragma once

#include "lossav/preferences.hpp"
#include "lossav/processes.hpp"
#include "lossav/quadrature.hpp"

namespace lossav {

struct EquilibriumPrices {
    double r_f = 0.0;
    double pd = 0.0;
    double e_rs = 0.0;
    double erp = 0.0;
};

struct EulerResiduals {
    double res_stock = 0.0;
    double res_bond = 0.0;
};

// Law of Y_{t+1} given Y_t used by the closed-form model.
//  stationary:  log(Y'/Y) ~ N(0, 2(1-phi) sigma_y^2/(1-phi^2)), same at every state
//  conditional: AR(1) step, log Y' ~ N((1-phi)kappa + phi log Y, sigma_y^2)
enum class DividendLaw { stationary, conditional };

const char* to_string(DividendLaw law);
DividendLaw dividend_law_from_string(const std::string& s);

struct Thresholds {
    double rf_threshold;
    double pd_threshold;
};

// E[eps^-theta F] / E[eps^-theta] and E_t[eps^-theta eps_d F] / E_t[eps^-theta eps_d]
Thresholds statics_thresholds(const PreferenceParams& prefs, const ProcessParams& p,
                              const QuadratureRule& rule, double logy_now);

double sdf2(const PreferenceParams& prefs, const ProcessParams& p, double eps_now, double eps_next);

class Model2 {
public:
    Model2(const PreferenceParams& prefs, const ProcessParams& p, QuadratureRule rule,
           DividendLaw law = DividendLaw::stationary);

    const PreferenceParams& prefs() const { return prefs_; }
    const ProcessParams& process() const { return p_; }
    const QuadratureRule& rule() const { return rule_; }
    DividendLaw law() const { return law_; }

    // log Y_{t+1} for a standard normal shock z
    double next_logy(double logy, double z) const;
    // E_t[Y_t / Y_{t+1}]
    double expected_y_ratio(double logy) const;
    // beta E[eps^(1-theta)] E_t[Y_t/Y_{t+1}]
    double growth_condition(double logy) const;

    double weight(double eps) const;  // Lambda(F(eps))
    double risk_free(double eps) const;
    double pd(double eps, double logy) const;  // throws PricingError if growth condition fails
    EquilibriumPrices price(const MarketState& s) const;
    double erp_closed_form(const MarketState& s) const;
    // realised R_S from the pricing formula with time-t expectations
    double stock_return(const MarketState& s, double eps_next, double logy_next) const;
    double sdf(double eps_now, double eps_next) const;
    EulerResiduals euler_residuals(const MarketState& s) const;
    double cw_ratio(const MarketState& s) const;
    // integrand of the second cw term at one draw, for simulation checks
    double cw_term2_integrand(const MarketState& s, double eps_next, double logy_next) const;
    double cw_term1(const MarketState& s) const;

private:
    template <class F>
    double expect_next(double logy, F&& f) const;

    PreferenceParams prefs_;
    ProcessParams p_;
    QuadratureRule rule_;
    DividendLaw law_;
    double a1_;   // E[eps^(1-theta)]
    double el0_;  // E[eps^-theta Lambda]
    double el1_;  // E[eps^(1-theta) Lambda]
    double ratio_sd_;
};

}  // namespace lossav
