#include "lossav/model1.hpp"

#include <algorithm>
#include <cmath>

#include "lossav/errors.hpp"
#include "lossav/solvers.hpp"

namespace lossav {

HOperator::HOperator(const PreferenceParams& prefs, const ProcessParams& p, QuadratureRule rule)
    : prefs_(prefs), p_(p), rule_(std::move(rule)) {
    prefs_.validate();
    p_.validate();
    prefs_.require_growth_condition(p_);
    // frozen once for the whole solve
    c_ = 1.0 - prefs_.growth_factor(p_);
    for (std::size_t i = 0; i < rule_.nodes.size(); ++i) {
        Node n;
        n.eps = std::exp(p_.mu_c + p_.sigma_c * rule_.nodes[i]);
        n.w = rule_.weights[i];
        n.lam = weight(n.eps);
        n.pw1 = std::pow(n.eps, 1.0 - prefs_.theta);
        n.pw0 = std::pow(n.eps, -prefs_.theta);
        nodes_.push_back(n);
    }
}

double HOperator::weight(double eps) const { return weight_contemp(prefs_, cdf_eps(p_, eps)); }
double HOperator::prosp(double eps) const { return weight_prosp(prefs_, cdf_eps(p_, eps)); }

HOperator::Parts HOperator::parts(const GridFunction& h, double logy, ClampCounter* counter) const {
    const auto& g = h.grid;
    const std::size_t q = nodes_.size();
    Stencil se[256];
    for (std::size_t i = 0; i < q; ++i) se[i] = locate(g.eps_axis, nodes_[i].eps);
    Parts out;
    for (std::size_t k = 0; k < q; ++k) {
        const double wk = rule_.weights[k];
        const double ly = step_log_y(p_, logy, rule_.nodes[k]);
        const double yn = std::exp(ly);
        const double ratio = std::exp(logy - ly);
        const Stencil sy = locate(g.logy_axis, ly);
        double a = 0.0, b = 0.0, cc = 0.0;
        for (std::size_t i = 0; i < q; ++i) {
            const Node& n = nodes_[i];
            const double hn = interp(h, se[i], sy);
            const double lc = n.lam * c_;
            const double den = yn * lc + hn;
            a += n.w * n.pw1 * (lc + hn) / den;
            b += n.w * n.pw1 * (hn + lc);
            cc += n.w * n.pw0 * yn * n.lam / den;
            if (counter) {
                ++counter->evaluations;
                if (se[i].clamped || sy.clamped) ++counter->clamped;
            }
        }
        out.A += wk * a;
        out.B += wk * ratio * b;
        out.C += wk * cc;
    }
    if (!std::isfinite(out.A) || !std::isfinite(out.B) || !std::isfinite(out.C))
        detail::non_finite("h operator", NAN, logy);
    return out;
}

double HOperator::combine(const Parts& q, double eps, double logy) const {
    const double beta = prefs_.beta;
    double v = beta * q.B;
    if (prefs_.gamma != 0.0) v += prefs_.gamma * prosp(eps) * beta * std::exp(logy) * q.A;
    return v;
}

GridFunction HOperator::apply(const GridFunction& h, ClampCounter* counter) const {
    GridFunction out(h.grid);
    const auto& g = h.grid;
    std::vector<double> gam(g.ne());
    for (std::size_t i = 0; i < g.ne(); ++i) gam[i] = prosp(g.eps_axis[i]);
    for (std::size_t j = 0; j < g.ny(); ++j) {
        Parts q = parts(h, g.logy_axis[j], counter);
        const double y = std::exp(g.logy_axis[j]);
        for (std::size_t i = 0; i < g.ne(); ++i)
            out.at(i, j) = prefs_.gamma * gam[i] * prefs_.beta * y * q.A + prefs_.beta * q.B;
    }
    return out;
}

double HOperator::evaluate(const GridFunction& h, double eps, double logy) const {
    return combine(parts(h, logy), eps, logy);
}

double HOperator::clamped_mass(const Grid2D& g) const {
    double in_eps = 0.0;
    for (const Node& n : nodes_)
        if (n.eps >= g.eps_axis.front() && n.eps <= g.eps_axis.back()) in_eps += n.w;
    double sd = std::sqrt(stationary_log_y(p_).variance);
    double num = 0.0, den = 0.0;
    for (double ly0 : g.logy_axis) {
        double in_y = 0.0;
        for (std::size_t k = 0; k < rule_.nodes.size(); ++k) {
            double ly = step_log_y(p_, ly0, rule_.nodes[k]);
            if (ly >= g.logy_axis.front() && ly <= g.logy_axis.back()) in_y += rule_.weights[k];
        }
        double z = sd > 0.0 ? (ly0 - p_.kappa) / sd : 0.0;
        double pi = std::exp(-0.5 * z * z);
        num += pi * (1.0 - in_eps * in_y);
        den += pi;
    }
    return den > 0.0 ? num / den : 0.0;
}

GridFunction t_operator(const PreferenceParams& prefs, const ProcessParams& p,
                        const QuadratureRule& rule, const GridFunction& h) {
    return HOperator(prefs, p, rule).apply(h);
}

static Grid2D widen_logy(const Grid2D& g, double by) {
    double lo = std::max(0.0, g.logy_axis.front() - by);
    double hi = g.logy_axis.back() + by;
    std::vector<double> ly(g.ny());
    for (std::size_t j = 0; j < ly.size(); ++j)
        ly[j] = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(ly.size() - 1);
    ly.back() = hi;
    return Grid2D(g.eps_axis, std::move(ly));
}

HSolution solve_h(const PreferenceParams& prefs, const ProcessParams& p, const QuadratureRule& rule,
                  const Grid2D& grid0, const SolverOptions& opts) {
    HOperator op(prefs, p, rule);
    Grid2D grid = grid0;
    const double sd = std::sqrt(stationary_log_y(p).variance);
    HSolution sol;
    for (int attempt = 0;; ++attempt) {
        sol.clamped_mass = op.clamped_mass(grid);
        if (opts.auto_widen && sol.clamped_mass > opts.clamp_mass_limit && attempt < opts.max_widen &&
            sd > 0.0) {
            grid = widen_logy(grid, sd);
            ++sol.widenings;
            continue;
        }
        break;
    }
    auto r = fixed_point([&](const GridFunction& v) { return op.apply(v); }, GridFunction(grid, 0.0),
                         opts.tol, opts.max_iter);
    ClampCounter cnt;
    op.apply(r.value, &cnt);
    sol.h = std::move(r.value);
    sol.iterations = r.iterations;
    sol.residual_history = std::move(r.residual_history);
    sol.final_residual = sol.residual_history.back();
    sol.clamp_count = cnt.clamped;
    sol.evaluations = cnt.evaluations;
    sol.tol = opts.tol;
    const auto& hist = sol.residual_history;
    double worst = 0.0, logsum = 0.0;
    int used = 0;
    for (std::size_t n = 1; n < hist.size(); ++n) {
        if (hist[n - 1] <= 0.0) continue;
        double ratio = hist[n] / hist[n - 1];
        worst = std::max(worst, ratio);
    }
    // tail estimate away from the rounding floor
    for (std::size_t n = hist.size(); n-- > 1 && used < 20;) {
        if (hist[n - 1] <= 0.0 || hist[n] <= 0.0) continue;
        if (hist[n] < 1e3 * opts.tol && hist.size() > 25) continue;
        logsum += std::log(hist[n] / hist[n - 1]);
        ++used;
    }
    sol.max_contraction_ratio = worst;
    sol.contraction_ratio_estimate = used ? std::exp(logsum / used) : worst;
    return sol;
}

double h_gamma0_series(const PreferenceParams& prefs, const ProcessParams& p,
                       const QuadratureRule& rule, double logy) {
    prefs.require_growth_condition(p);
    const double a = prefs.growth_factor(p);
    const double c = 1.0 - a;
    const double th = prefs.theta;
    double el1 = expect_eps(rule, [&](double e) {
        return std::pow(e, 1.0 - th) * weight_contemp(prefs, cdf_eps(p, e));
    }, p);
    const double s2 = p.sigma_y * p.sigma_y / (1.0 - p.phi * p.phi);
    double sum = 0.0, ak = 1.0, phik = 1.0;
    for (int k = 1; k < 100000; ++k) {
        phik *= p.phi;
        double term = ak * std::exp((1.0 - phik) * (logy - p.kappa) + 0.5 * s2 * (1.0 - phik * phik));
        sum += term;
        if (term < 1e-18 * sum) break;
        ak *= a;
    }
    return c * prefs.beta * el1 * sum;
}

Model1::Model1(const PreferenceParams& prefs, const ProcessParams& p, QuadratureRule rule, HSolution sol)
    : prefs_(prefs), p_(p), op_(prefs, p, std::move(rule)), sol_(std::move(sol)) {
    if (sol_.h.values.empty()) throw ArgumentError("model1: empty h solution");
    sol_.h.check_finite();
    if (sol_.tol > 0.0 && !(sol_.final_residual < sol_.tol))
        throw PricingError("model1: solution residual " + format_double(sol_.final_residual) +
                           " exceeds tolerance " + format_double(sol_.tol));
    el0_ = 0.0;
    for (const auto& n : op_.eps_nodes()) el0_ += n.w * n.pw0 * n.lam;
}

static bool node_index(const std::vector<double>& axis, double x, std::size_t& idx) {
    auto it = std::lower_bound(axis.begin(), axis.end(), x);
    if (it == axis.end() || *it != x) return false;
    idx = static_cast<std::size_t>(it - axis.begin());
    return true;
}

double Model1::h_at(double eps, double logy) const {
    std::size_t i = 0, j = 0;
    if (node_index(sol_.h.grid.eps_axis, eps, i) && node_index(sol_.h.grid.logy_axis, logy, j))
        return sol_.h.at(i, j);
    return op_.evaluate(sol_.h, eps, logy);
}

double Model1::h_next(double eps, double logy) const { return interp(sol_.h, eps, logy); }

void Model1::rf_pd(double eps, double logy, double& rf, double& pd) const {
    auto q = op_.parts(sol_.h, logy);
    std::size_t i = 0, j = 0;
    double ht = (node_index(sol_.h.grid.eps_axis, eps, i) && node_index(sol_.h.grid.logy_axis, logy, j))
                    ? sol_.h.at(i, j)
                    : op_.combine(q, eps, logy);
    double lam = op_.weight(eps);
    rf = lam / (prefs_.gamma * op_.prosp(eps) * prefs_.beta * q.C + prefs_.beta * el0_);
    pd = ht / (lam * op_.c());
}

double Model1::risk_free(double eps, double logy) const {
    double rf, pd;
    rf_pd(eps, logy, rf, pd);
    return rf;
}

double Model1::pd(double eps, double logy) const { return h_at(eps, logy) / (op_.weight(eps) * op_.c()); }

double Model1::stock_return(const MarketState& s, double e, double ly) const {
    double ht = h_at(s.eps_c, s.log_y());
    double lam_t = op_.weight(s.eps_c);
    double hn = h_next(e, ly);
    return e * std::exp(s.log_y() - ly) * (lam_t / ht) * (hn / op_.weight(e) + op_.c());
}

EquilibriumPrices Model1::price(const MarketState& s) const {
    const double ly0 = s.log_y();
    EquilibriumPrices out;
    rf_pd(s.eps_c, ly0, out.r_f, out.pd);
    const double lam_t = op_.weight(s.eps_c);
    const double ht = out.pd * lam_t * op_.c();
    const double c = op_.c();
    const auto& rule = op_.rule();
    double ers = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        double ly = step_log_y(p_, ly0, rule.nodes[k]);
        double inner = 0.0;
        for (const auto& n : op_.eps_nodes()) {
            double hn = h_next(n.eps, ly);
            inner += n.w * n.eps * (hn / n.lam + c);
        }
        ers += rule.weights[k] * std::exp(ly0 - ly) * inner;
    }
    out.e_rs = ers * lam_t / ht;
    out.erp = out.e_rs - out.r_f;
    return out;
}

double Model1::sdf(double eps_now, double e, double ly) const {
    if (!(eps_now > 0.0) || !(e > 0.0)) throw DomainError("sdf1: consumption growth must be > 0");
    double lam_t = op_.weight(eps_now);
    double lam = op_.weight(e);
    double yn = std::exp(ly);
    double hn = h_next(e, ly);
    double pw0 = std::pow(e, -prefs_.theta);
    return prefs_.beta / lam_t *
           (pw0 * lam + prefs_.gamma * op_.prosp(eps_now) * pw0 * yn * lam / (yn * lam * op_.c() + hn));
}

double sdf1(const Model1& m, double eps_now, double eps_next, double logy_next) {
    return m.sdf(eps_now, eps_next, logy_next);
}

namespace {

// both Euler equations written as 1 = standard term + prospective term
EulerResiduals euler_impl(const HOperator& op, const ProcessParams& p, const PreferenceParams& pr,
                          const GridFunction& h, double eps_t, double ly0, double ht, double rf) {
    const double c = op.c();
    const double lam_t = op.weight(eps_t);
    const double gam_t = op.prosp(eps_t);
    const double k = pr.gamma * pr.beta / c * gam_t / lam_t;
    const auto& rule = op.rule();
    double s1 = 0, s2 = 0, b1 = 0, b2 = 0;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        double ly = step_log_y(p, ly0, rule.nodes[j]);
        double yn = std::exp(ly);
        double ratio = std::exp(ly0 - ly);
        for (const auto& n : op.eps_nodes()) {
            double w = rule.weights[j] * n.w;
            double hn = interp(h, n.eps, ly);
            double pdn = hn / (n.lam * c);
            double rs = n.eps * ratio * (pdn + 1.0) * lam_t * c / ht;
            double std_term = n.pw0 * n.lam / lam_t;
            double pro_term = n.pw0 * yn / (pdn + yn);
            s1 += w * std_term * rs;
            s2 += w * pro_term * rs;
            b1 += w * std_term;
            b2 += w * pro_term;
        }
    }
    EulerResiduals r;
    r.res_stock = std::fabs(1.0 - (pr.beta * s1 + k * s2));
    r.res_bond = std::fabs(1.0 - (pr.beta * b1 + k * b2) * rf);
    return r;
}

}  // namespace

EulerResiduals Model1::euler_residuals(const MarketState& s) const {
    double rf, pd;
    rf_pd(s.eps_c, s.log_y(), rf, pd);
    double ht = pd * op_.weight(s.eps_c) * op_.c();
    return euler_impl(op_, p_, prefs_, sol_.h, s.eps_c, s.log_y(), ht, rf);
}

EulerResiduals Model1::euler_residuals_with(const MarketState& s, const GridFunction& h) const {
    double rf = risk_free(s.eps_c, s.log_y());
    double ht = interp(h, s.eps_c, s.log_y());
    return euler_impl(op_, p_, prefs_, h, s.eps_c, s.log_y(), ht, rf);
}

double Model1::cw_term1(const MarketState& s) const {
    double el1 = 0.0;
    for (const auto& n : op_.eps_nodes()) el1 += n.w * n.pw1 * n.lam;
    return prefs_.beta * el1 / op_.weight(s.eps_c);
}

double Model1::cw_term2_integrand(const MarketState& s, double e, double ly) const {
    double hn = h_next(e, ly);
    return prefs_.beta * std::pow(e, 1.0 - prefs_.theta) * hn /
           (std::exp(ly) * op_.weight(s.eps_c) * op_.c());
}

double Model1::cw_ratio(const MarketState& s) const {
    double t2 = expect_joint(op_.rule(), [&](double e, double ly) { return cw_term2_integrand(s, e, ly); },
                             p_, s.log_y());
    return 1.0 / (1.0 + cw_term1(s) + t2);
}

double Model1::cw_ratio_printed(const MarketState& s) const {
    const auto& rule = op_.rule();
    const double d = 1.0 - prefs_.beta * lognormal_moment(p_, -prefs_.theta);
    const double lam_t = op_.weight(s.eps_c);
    double t2 = expect_joint(rule, [&](double e, double ly) {
        double inner = expect_joint(rule, [&](double e2, double ly2) { return h_next(e2, ly2); }, p_, ly);
        return prefs_.beta * std::pow(e, 1.0 - prefs_.theta) * inner / (std::exp(ly) * lam_t * d);
    }, p_, s.log_y());
    return 1.0 / (1.0 + cw_term1(s) + t2);
}

double Model1::lower_bound_expectation(const MarketState& s, double hl) const {
    const double c = op_.c();
    const double gl = prefs_.gamma * prefs_.lambda;
    const double ly0 = s.log_y();
    return expect_joint(op_.rule(), [&](double e, double ly) {
        double lc = op_.weight(e) * c;
        double base = prefs_.beta * std::pow(e, 1.0 - prefs_.theta) * std::exp(ly0 - ly);
        double v = base * gl * lc / ((lc + hl) * (lc + hl)) + base;
        return v * v;
    }, p_, ly0);
}

Model1::LowerBound Model1::h_lower_bound(const MarketState& s) const {
    LowerBound out;
    if (prefs_.gamma == 0.0) {
        out.degenerate = true;
        out.residual = lower_bound_expectation(s, 0.0) - 1.0;
        return out;
    }
    auto f = [&](double hl) { return lower_bound_expectation(s, hl) - 1.0; };
    try {
        out.value = bisect(f, 0.0, 1e6, 1e-13);
    } catch (const BracketError&) {
        out.bracketed = false;
        out.residual = f(0.0);
        return out;
    }
    out.residual = f(out.value);
    return out;
}

double cw_ratio_no_gain_loss(const PreferenceParams& prefs, const ProcessParams& p,
                             const QuadratureRule& rule, const MarketState& s) {
    const double a = prefs.growth_factor(p);
    return 1.0 / (1.0 + expect_joint(rule, [&](double e, double ly) {
        double q = a * std::exp((1.0 - p.phi) * (ly - p.kappa) + 0.5 * p.sigma_y * p.sigma_y);
        if (!(q < 1.0)) throw PricingError("growth condition violated at log Y = " + format_double(ly));
        return prefs.beta * std::pow(e, 1.0 - prefs.theta) * (1.0 + q / (std::exp(ly) * (1.0 - q)));
    }, p, s.log_y()));
}

}  // namespace lossav
