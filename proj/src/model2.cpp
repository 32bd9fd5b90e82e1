#include "lossav/model2.hpp"

#include <cmath>
#include <string>

#include "lossav/errors.hpp"
#include "lossav/grid.hpp"

namespace lossav {

const char* to_string(DividendLaw law) {
    return law == DividendLaw::stationary ? "stationary" : "conditional";
}

DividendLaw dividend_law_from_string(const std::string& s) {
    if (s == "stationary") return DividendLaw::stationary;
    if (s == "conditional") return DividendLaw::conditional;
    throw ArgumentError("dividend law must be 'stationary' or 'conditional', got '" + s + "'");
}

Thresholds statics_thresholds(const PreferenceParams& prefs, const ProcessParams& p,
                              const QuadratureRule& rule, double) {
    double th = prefs.theta;
    auto pw = [&](double e, double a) { return std::pow(e, a); };
    double n0 = expect_eps(rule, [&](double e) { return pw(e, -th) * cdf_eps(p, e); }, p);
    double d0 = expect_eps(rule, [&](double e) { return pw(e, -th); }, p);
    // the dividend-growth factor E_t[Y_t/Y_{t+1}] is independent of eps and cancels
    double n1 = expect_eps(rule, [&](double e) { return pw(e, 1.0 - th) * cdf_eps(p, e); }, p);
    double d1 = expect_eps(rule, [&](double e) { return pw(e, 1.0 - th); }, p);
    return {n0 / d0, n1 / d1};
}

double sdf2(const PreferenceParams& prefs, const ProcessParams& p, double eps_now, double eps_next) {
    if (!(eps_now > 0.0) || !(eps_next > 0.0)) throw DomainError("sdf2: inputs must be > 0");
    return prefs.beta * std::pow(eps_next, -prefs.theta) *
           weight_contemp(prefs, cdf_eps(p, eps_next)) / weight_contemp(prefs, cdf_eps(p, eps_now));
}

Model2::Model2(const PreferenceParams& prefs, const ProcessParams& p, QuadratureRule rule,
               DividendLaw law)
    : prefs_(prefs), p_(p), rule_(std::move(rule)), law_(law) {
    prefs_.validate();
    p_.validate();
    const double th = prefs_.theta;
    a1_ = lognormal_moment(p_, 1.0 - th);
    el0_ = expect_eps(rule_, [&](double e) { return std::pow(e, -th) * weight(e); }, p_);
    el1_ = expect_eps(rule_, [&](double e) { return std::pow(e, 1.0 - th) * weight(e); }, p_);
    ratio_sd_ = std::sqrt(log_y_ratio_dists(p_, 0.0).uncond_var);
}

double Model2::weight(double eps) const { return weight_contemp(prefs_, cdf_eps(p_, eps)); }

double Model2::next_logy(double logy, double z) const {
    if (law_ == DividendLaw::stationary) return logy + ratio_sd_ * z;
    return step_log_y(p_, logy, z);
}

double Model2::expected_y_ratio(double logy) const {
    if (law_ == DividendLaw::stationary) return std::exp(0.5 * ratio_sd_ * ratio_sd_);
    return std::exp((1.0 - p_.phi) * (logy - p_.kappa) + 0.5 * p_.sigma_y * p_.sigma_y);
}

double Model2::growth_condition(double logy) const {
    return prefs_.beta * a1_ * expected_y_ratio(logy);
}

template <class F>
double Model2::expect_next(double logy, F&& f) const {
    double s = 0.0;
    for (std::size_t j = 0; j < rule_.nodes.size(); ++j) {
        double ly = next_logy(logy, rule_.nodes[j]);
        double inner = 0.0;
        for (std::size_t i = 0; i < rule_.nodes.size(); ++i) {
            double e = std::exp(p_.mu_c + p_.sigma_c * rule_.nodes[i]);
            double v = f(e, ly);
            if (!std::isfinite(v)) detail::non_finite("model2 expectation", e, ly);
            inner += rule_.weights[i] * v;
        }
        s += rule_.weights[j] * inner;
    }
    return s;
}

double Model2::risk_free(double eps) const { return weight(eps) / (prefs_.beta * el0_); }

double Model2::pd(double eps, double logy) const {
    double q = growth_condition(logy);
    if (!(q < 1.0))
        throw PricingError("growth condition violated at log Y = " + format_double(logy) +
                           ": beta*E_t[eps^-theta eps_d] = " + format_double(q));
    double n = prefs_.beta * el1_ * expected_y_ratio(logy);
    return n / (weight(eps) * (1.0 - q));
}

double Model2::stock_return(const MarketState& s, double eps_next, double logy_next) const {
    double ly = s.log_y();
    double q = growth_condition(ly);
    double n = prefs_.beta * el1_ * expected_y_ratio(ly);
    double ed = eps_next * std::exp(ly - logy_next);
    return weight(s.eps_c) * ed * ((1.0 - q) / n + 1.0 / weight(eps_next));
}

EquilibriumPrices Model2::price(const MarketState& s) const {
    EquilibriumPrices out;
    out.r_f = risk_free(s.eps_c);
    out.pd = pd(s.eps_c, s.log_y());
    out.e_rs = expect_next(s.log_y(), [&](double e, double ly) { return stock_return(s, e, ly); });
    out.erp = out.e_rs - out.r_f;
    return out;
}

double Model2::erp_closed_form(const MarketState& s) const {
    double ly = s.log_y();
    double g = expected_y_ratio(ly);
    double q = growth_condition(ly);
    double n = prefs_.beta * el1_ * g;
    double l = weight(s.eps_c);
    double e_ed_over_l = g * expect_eps(rule_, [&](double e) { return e / weight(e); }, p_);
    double e_ed = g * lognormal_moment(p_, 1.0);
    return l * (e_ed_over_l + e_ed * (1.0 - q) / n - 1.0 / (prefs_.beta * el0_));
}

double Model2::sdf(double eps_now, double eps_next) const {
    return prefs_.beta * std::pow(eps_next, -prefs_.theta) * weight(eps_next) / weight(eps_now);
}

EulerResiduals Model2::euler_residuals(const MarketState& s) const {
    double rf = risk_free(s.eps_c);
    double em = expect_eps(rule_, [&](double e) { return sdf(s.eps_c, e); }, p_);
    double emr = expect_next(s.log_y(), [&](double e, double ly) {
        return sdf(s.eps_c, e) * stock_return(s, e, ly);
    });
    return {std::fabs(emr - 1.0), std::fabs(em * rf - 1.0)};
}

double Model2::cw_term1(const MarketState& s) const {
    double l = weight(s.eps_c);
    return prefs_.beta * el1_ / l;
}

double Model2::cw_term2_integrand(const MarketState& s, double e, double ly) const {
    double q = growth_condition(ly);
    if (!(q < 1.0))
        throw PricingError("growth condition violated inside the consumption-wealth expectation at log Y = " +
                           format_double(ly));
    double n = prefs_.beta * el1_ * expected_y_ratio(ly);
    // Lambda' * pd' = N' / (1 - q')
    return prefs_.beta * std::pow(e, 1.0 - prefs_.theta) * std::exp(-ly) * n /
           ((1.0 - q) * weight(s.eps_c));
}

double Model2::cw_ratio(const MarketState& s) const {
    double t2 = expect_next(s.log_y(), [&](double e, double ly) { return cw_term2_integrand(s, e, ly); });
    return 1.0 / (1.0 + cw_term1(s) + t2);
}

}  // namespace lossav
