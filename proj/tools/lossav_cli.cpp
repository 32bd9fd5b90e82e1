#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <sstream>

#include "lossav/config.hpp"
#include "lossav/errors.hpp"
#include "lossav/grid.hpp"
#include "lossav/reproduce.hpp"

using namespace lossav;
using nlohmann::json;

namespace {

std::string num(double v) { return format_double(v); }

// nlohmann prints doubles with round-trip precision already
void emit_json(const json& j) { std::cout << j.dump(2) << '\n'; }

json prefs_json(const PreferenceParams& p) {
    return {{"beta", p.beta}, {"theta", p.theta}, {"b", p.b}, {"lambda", p.lambda}, {"gamma", p.gamma}};
}

json params_json(const ProcessParams& p) {
    return {{"mu_c", p.mu_c}, {"sigma_c", p.sigma_c}, {"phi", p.phi}, {"kappa", p.kappa}, {"sigma_y", p.sigma_y}};
}

json solution_meta(const RunConfig& cfg, const HSolution& s) {
    return {{"tolerance", s.tol},
            {"iterations", s.iterations},
            {"final_residual", s.final_residual},
            {"contraction_ratio_estimate", s.contraction_ratio_estimate},
            {"max_contraction_ratio", s.max_contraction_ratio},
            {"clamp_count", s.clamp_count},
            {"evaluations", s.evaluations},
            {"clamped_mass", s.clamped_mass},
            {"widenings", s.widenings},
            {"quad_order", cfg.quad_order},
            {"prefs", prefs_json(cfg.prefs)},
            {"params", params_json(cfg.params)}};
}

HSolution solve_for(const RunConfig& cfg) {
    return solve_h(cfg.prefs, cfg.params, cfg.rule(),
                   make_default_grid(cfg.params, cfg.grid_ne, cfg.grid_ny), cfg.solver);
}

HSolution load_cache(const RunConfig& cfg, const std::string& dir) {
    json meta;
    HSolution s;
    s.h = load_grid_function(dir + "/h", &meta);
    if (meta.value("prefs", json()) != prefs_json(cfg.prefs) || meta.value("params", json()) != params_json(cfg.params) ||
        meta.value("quad_order", -1) != cfg.quad_order)
        throw ArgumentError("cache in " + dir + " was solved with different parameters");
    s.iterations = meta.value("iterations", 0);
    s.final_residual = meta.value("final_residual", 0.0);
    s.tol = meta.value("tolerance", 0.0);
    s.contraction_ratio_estimate = meta.value("contraction_ratio_estimate", 0.0);
    s.max_contraction_ratio = meta.value("max_contraction_ratio", 0.0);
    s.clamp_count = meta.value("clamp_count", std::size_t{0});
    s.evaluations = meta.value("evaluations", std::size_t{0});
    s.clamped_mass = meta.value("clamped_mass", 0.0);
    s.widenings = meta.value("widenings", 0);
    return s;
}

std::vector<double> parse_values(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(tok, &pos));
            if (pos != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ArgumentError("--values: cannot parse '" + tok + "'");
        }
    }
    if (out.empty()) throw ArgumentError("--values: empty list");
    return out;
}

const char* kMomentHeader = "rf_mean,rf_sd,pd_mean,pd_sd,erp_mean,erp_sd,n_paths,horizon,burn_in,seed";

std::string moment_row(const MomentReport& r) {
    return num(r.rf_mean) + "," + num(r.rf_sd) + "," + num(r.pd_mean) + "," + num(r.pd_sd) + "," +
           num(r.erp_mean) + "," + num(r.erp_sd) + "," + std::to_string(r.n_paths) + "," +
           std::to_string(r.horizon) + "," + std::to_string(r.burn_in) + "," + std::to_string(r.seed);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Equilibrium asset prices with gain-loss utility"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::map<std::string, std::string> flags;
    auto add_flag = [&](const std::string& name, const std::string& key, const std::string& help) {
        app.add_option_function<std::string>(name, [&flags, key](const std::string& v) { flags[key] = v; }, help);
    };
    app.add_option("--config", config_path, "key = value config file");
    add_flag("--seed", "seed", "simulation seed (u64)");
    add_flag("--format", "format", "csv or json");
    add_flag("--quad-order", "quad_order", "Gauss-Hermite order per dimension");
    add_flag("--grid", "grid", "grid size <ne>x<ny>");
    add_flag("--beta", "beta", "discount factor");
    add_flag("--theta", "theta", "relative risk aversion");
    add_flag("--b", "b", "contemporaneous gain-loss weight");
    add_flag("--lambda", "lambda", "loss aversion");
    add_flag("--gamma", "gamma", "prospective gain-loss weight");
    add_flag("--mu-c", "mu_c", "mean log consumption growth");
    add_flag("--sigma-c", "sigma_c", "s.d. log consumption growth");
    add_flag("--phi", "phi", "AR(1) persistence of log Y");
    add_flag("--kappa", "kappa", "long-run mean of log Y");
    add_flag("--sigma-y", "sigma_y", "AR(1) innovation s.d.");
    add_flag("--dividend-law", "dividend_law", "stationary or conditional (closed-form model)");
    add_flag("--n-paths", "n_paths", "simulated paths");
    add_flag("--horizon", "horizon", "periods per path");
    add_flag("--burn-in", "burn_in", "discarded periods per path");
    add_flag("--tol", "tol", "fixed-point tolerance");
    add_flag("--max-iter", "max_iter", "fixed-point iteration cap");

    auto* cal = app.add_subcommand("calibrate", "maximum-likelihood calibration from annual data");
    std::string csv_path;
    cal->add_option("csv", csv_path, "year,consumption,dividends file")->required();

    auto* price = app.add_subcommand("price", "conditional prices at one state");
    int model = 0;
    double eps = NAN, y = NAN;
    std::string cache;
    price->add_option("--model", model, "1 or 2")->required();
    price->add_option("--eps", eps, "consumption growth")->required();
    price->add_option("--y", y, "consumption-dividend ratio")->required();
    price->add_option("--cache", cache, "directory written by solve-h");

    auto* solve = app.add_subcommand("solve-h", "solve the integral equation and cache h");
    std::string out_dir;
    solve->add_option("--out", out_dir, "output directory")->required();

    auto* sim = app.add_subcommand("simulate", "unconditional moments from a simulated panel");
    int sim_model = 0;
    std::string sweep_axis, sweep_values;
    sim->add_option("--model", sim_model, "1 or 2")->required();
    sim->add_option("--sweep", sweep_axis, "lambda, b, gamma, theta or beta");
    sim->add_option("--values", sweep_values, "comma-separated values");

    auto* rep = app.add_subcommand("reproduce", "recompute a published table or figure series");
    std::string target, ref_path, rep_out;
    rep->add_option("target", target, "table2..table8, figure1, figure2")->required();
    rep->add_option("--reference", ref_path, "reference values file");
    rep->add_option("--out", rep_out, "directory for <target>.csv and <target>_summary.json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty()) apply_settings(cfg, read_config_file(config_path));
        apply_settings(cfg, flags);
        if (*price) cfg.model = model;
        if (*sim) cfg.model = sim_model;
        cfg.validate();
        const bool as_json = cfg.format == "json";

        if (*cal) {
            AnnualSeries data = read_annual_csv(csv_path);
            Calibration c = mle_calibrate(data.consumption, data.dividends);
            const auto& p = c.params;
            double em = lognormal_moment(p, 1.0);
            double esd = em * std::sqrt(std::expm1(p.sigma_c * p.sigma_c));
            json j = {{"mu_c", p.mu_c}, {"sigma_c", p.sigma_c}, {"phi", p.phi}, {"kappa", p.kappa},
                      {"sigma_y", p.sigma_y},
                      {"se", {{"mu_c", c.se.mu_c}, {"sigma_c", c.se.sigma_c}, {"phi", c.se.phi},
                              {"kappa", c.se.kappa}, {"sigma_y", c.se.sigma_y}}},
                      {"n_obs", c.n_obs},
                      {"first_year", data.years.front()},
                      {"last_year", data.years.back()},
                      {"eps_c_mean", em},
                      {"eps_c_sd", esd},
                      {"phi_identified", c.phi_identified},
                      {"nonstationary", c.nonstationary},
                      {"warnings", c.warnings}};
            if (c.phi_identified && !c.nonstationary) {
                auto st = stationary_log_y(p);
                j["y_stationary_mean"] = st.level_mean;
                j["y_stationary_sd"] = st.level_sd;
            }
            if (as_json) {
                emit_json(j);
            } else {
                std::cout << "mu_c,sigma_c,phi,kappa,sigma_y,se_mu_c,se_sigma_c,se_phi,se_kappa,se_sigma_y,n_obs\n"
                          << num(p.mu_c) << ',' << num(p.sigma_c) << ',' << num(p.phi) << ',' << num(p.kappa)
                          << ',' << num(p.sigma_y) << ',' << num(c.se.mu_c) << ',' << num(c.se.sigma_c) << ','
                          << num(c.se.phi) << ',' << num(c.se.kappa) << ',' << num(c.se.sigma_y) << ','
                          << c.n_obs << '\n';
            }
            return 0;
        }

        if (*price) {
            MarketState s(eps, y);
            EquilibriumPrices pr;
            if (cfg.model == 2) {
                pr = Model2(cfg.prefs, cfg.params, cfg.rule(), cfg.law).price(s);
            } else {
                HSolution sol = cache.empty() ? solve_for(cfg) : load_cache(cfg, cache);
                pr = Model1(cfg.prefs, cfg.params, cfg.rule(), std::move(sol)).price(s);
            }
            if (as_json)
                emit_json({{"model", cfg.model}, {"eps_c", eps}, {"y", y}, {"r_f", pr.r_f}, {"pd", pr.pd},
                           {"e_rs", pr.e_rs}, {"erp", pr.erp}});
            else
                std::cout << "model,eps_c,y,r_f,pd,e_rs,erp\n"
                          << cfg.model << ',' << num(eps) << ',' << num(y) << ',' << num(pr.r_f) << ','
                          << num(pr.pd) << ',' << num(pr.e_rs) << ',' << num(pr.erp) << '\n';
            return 0;
        }

        if (*solve) {
            HSolution sol = solve_for(cfg);
            std::filesystem::create_directories(out_dir);
            json meta = solution_meta(cfg, sol);
            save_grid_function(sol.h, out_dir + "/h", meta);
            if (as_json) {
                emit_json(meta);
            } else {
                std::cout << "iterations,final_residual,contraction_ratio_estimate,clamp_count,clamped_mass\n"
                          << sol.iterations << ',' << num(sol.final_residual) << ','
                          << num(sol.contraction_ratio_estimate) << ',' << sol.clamp_count << ','
                          << num(sol.clamped_mass) << '\n';
            }
            return 0;
        }

        if (*sim) {
            ModelSpec spec = cfg.spec();
            std::vector<SweepRow> rows;
            if (!sweep_axis.empty() || !sweep_values.empty()) {
                if (sweep_axis.empty() || sweep_values.empty())
                    throw ArgumentError("--sweep and --values must be given together");
                rows = sweep(cfg.prefs, cfg.params, spec, sweep_axis, parse_values(sweep_values), cfg.sim);
            } else {
                rows = sweep(cfg.prefs, cfg.params, spec, "beta", {cfg.prefs.beta}, cfg.sim);
                sweep_axis = "beta";
            }
            if (as_json) {
                json arr = json::array();
                for (const auto& r : rows) {
                    json j = to_json(r.report);
                    j[sweep_axis] = r.value;
                    arr.push_back(j);
                }
                emit_json({{"model", cfg.model}, {"axis", sweep_axis}, {"rows", arr}});
            } else {
                std::cout << sweep_axis << ',' << kMomentHeader << '\n';
                for (const auto& r : rows) std::cout << num(r.value) << ',' << moment_row(r.report) << '\n';
            }
            return 0;
        }

        if (*rep) {
            auto ref = load_reference(ref_path.empty() ? default_reference_path() : ref_path);
            ReproResult r = reproduce(target, cfg, ref);
            std::string csv = cells_csv(r);
            json summary = to_json(r);
            if (!rep_out.empty()) {
                std::filesystem::create_directories(rep_out);
                std::ofstream(rep_out + "/" + target + ".csv") << csv;
                std::ofstream(rep_out + "/" + target + "_summary.json") << summary.dump(2) << '\n';
            }
            if (as_json)
                emit_json(summary);
            else
                std::cout << csv;
            return 0;
        }
    } catch (const ArgumentError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const ModelError& e) {
        std::cerr << "model error: " << e.what() << '\n';
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
