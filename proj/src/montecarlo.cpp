#include "lossav/montecarlo.hpp"

#include <cmath>

#include "lossav/errors.hpp"
#include "lossav/rng.hpp"

namespace lossav {

namespace {

struct Accum {
    double n = 0, mean = 0, m2 = 0;
    void add(double x) {
        n += 1;
        double d = x - mean;
        mean += d / n;
        m2 += d * (x - mean);
    }
    double sd() const { return n > 1 ? std::sqrt(m2 / (n - 1)) : 0.0; }
};

}  // namespace

MomentReport simulate_moments(const ModelRef& model, const ProcessParams& p, const SimConfig& cfg) {
    if ((model.m1 == nullptr) == (model.m2 == nullptr))
        throw ArgumentError("simulate_moments: exactly one model must be given");
    if (cfg.n_paths == 0) throw ArgumentError("simulate_moments: n_paths must be >= 1");
    if (!(cfg.burn_in + 1 < cfg.horizon))
        throw ArgumentError("simulate_moments: burn_in must be < horizon - 1");
    if (cfg.enforce_min_panel && cfg.n_paths * (cfg.horizon - cfg.burn_in) < 10000)
        throw ArgumentError("simulate_moments: n_paths*(horizon-burn_in) must be >= 10000");
    p.validate();
    const double sd_stat = std::sqrt(stationary_log_y(p).variance);

    Accum rf, pd, erp;
    std::vector<double> eps(cfg.horizon), ly(cfg.horizon), rfs(cfg.horizon), pds(cfg.horizon);
    for (std::size_t path = 0; path < cfg.n_paths; ++path) {
        NormalStream rng(cfg.seed, path);
        double l = p.kappa + sd_stat * rng.normal();
        for (std::size_t t = 0; t < cfg.horizon; ++t) {
            if (t > 0) l = step_log_y(p, l, rng.normal());
            ly[t] = l;
            eps[t] = std::exp(p.mu_c + p.sigma_c * rng.normal());
        }
        for (std::size_t t = cfg.burn_in; t < cfg.horizon; ++t) {
            if (model.m1) {
                model.m1->rf_pd(eps[t], ly[t], rfs[t], pds[t]);
            } else {
                const Model2& m = *model.m2;
                rfs[t] = m.risk_free(eps[t]);
                try {
                    pds[t] = m.pd(eps[t], ly[t]);
                } catch (const PricingError& e) {
                    throw PricingError(std::string(e.what()) + " (path " + std::to_string(path) +
                                       ", date " + std::to_string(t) + ")");
                }
            }
        }
        for (std::size_t t = cfg.burn_in; t + 1 < cfg.horizon; ++t) {
            double ed = eps[t + 1] * std::exp(ly[t] - ly[t + 1]);
            double rs = ed * (pds[t + 1] + 1.0) / pds[t];
            rf.add(rfs[t]);
            pd.add(pds[t]);
            erp.add(rs - rfs[t]);
        }
    }
    MomentReport r;
    r.rf_mean = rf.mean;
    r.rf_sd = rf.sd();
    r.pd_mean = pd.mean;
    r.pd_sd = pd.sd();
    r.erp_mean = erp.mean;
    r.erp_sd = erp.sd();
    r.n_paths = cfg.n_paths;
    r.horizon = cfg.horizon;
    r.burn_in = cfg.burn_in;
    r.seed = cfg.seed;
    return r;
}

void set_pref(PreferenceParams& prefs, const std::string& axis, double v) {
    if (axis == "lambda") prefs.lambda = v;
    else if (axis == "b") prefs.b = v;
    else if (axis == "gamma") prefs.gamma = v;
    else if (axis == "theta") prefs.theta = v;
    else if (axis == "beta") prefs.beta = v;
    else throw ArgumentError("sweep axis must be one of lambda, b, gamma, theta, beta; got '" + axis + "'");
}

std::vector<SweepRow> sweep(const PreferenceParams& base, const ProcessParams& p, const ModelSpec& spec,
                            const std::string& axis, const std::vector<double>& values,
                            const SimConfig& cfg) {
    std::vector<SweepRow> out;
    PreferenceParams probe = base;
    set_pref(probe, axis, base.beta);  // validates the axis name before any work
    for (double v : values) {
        PreferenceParams pr = base;
        set_pref(pr, axis, v);
        SweepRow row{v, pr, {}};
        if (spec.model == 1) {
            auto sol = solve_h(pr, p, spec.rule, make_default_grid(p, spec.grid_ne, spec.grid_ny), spec.solver);
            Model1 m(pr, p, spec.rule, std::move(sol));
            row.report = simulate_moments({&m, nullptr}, p, cfg);
        } else {
            Model2 m(pr, p, spec.rule, spec.law);
            row.report = simulate_moments({nullptr, &m}, p, cfg);
        }
        out.push_back(row);
    }
    return out;
}

std::vector<SeriesRow> conditional_series(const ModelRef& model, const std::string& axis,
                                          const std::vector<double>& xs, double fixed) {
    if ((model.m1 == nullptr) == (model.m2 == nullptr))
        throw ArgumentError("conditional_series: exactly one model must be given");
    if (axis != "eps" && axis != "y") throw ArgumentError("series axis must be 'eps' or 'y'");
    std::vector<SeriesRow> out;
    for (double x : xs) {
        MarketState s = axis == "eps" ? MarketState(x, fixed) : MarketState(fixed, x);
        EquilibriumPrices pr = model.m1 ? model.m1->price(s) : model.m2->price(s);
        out.push_back({x, pr.r_f, pr.pd, pr.erp});
    }
    return out;
}

}  // namespace lossav
