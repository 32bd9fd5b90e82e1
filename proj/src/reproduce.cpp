#include "lossav/reproduce.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "lossav/errors.hpp"
#include "lossav/grid.hpp"

namespace lossav {

std::string default_reference_path() { return std::string(LOSSAV_DATA_DIR) + "/published_values.txt"; }

std::vector<ReferenceValue> load_reference(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ArgumentError("cannot open reference file " + path);
    std::vector<ReferenceValue> out;
    std::string line, comment;
    int ln = 0;
    while (std::getline(f, line)) {
        ++ln;
        if (line.empty()) continue;
        if (line[0] == '#') {
            comment = line.substr(1);
            continue;
        }
        std::istringstream ss(line);
        ReferenceValue r;
        if (!(ss >> r.target >> r.column >> r.quantity >> r.value))
            throw DataError("reference file line " + std::to_string(ln) + ": expected 4 fields");
        r.comment = comment;
        out.push_back(r);
    }
    return out;
}

bool ReproResult::pass() const { return n_pass() == cells.size() && checks.value("pass", true); }

std::size_t ReproResult::n_pass() const {
    std::size_t n = 0;
    for (const auto& c : cells) n += c.pass;
    return n;
}

namespace {

std::map<std::string, double> ref_map(const std::vector<ReferenceValue>& ref, const std::string& target) {
    std::map<std::string, double> m;
    for (const auto& r : ref)
        if (r.target == target) m[r.column + "|" + r.quantity] = r.value;
    return m;
}

double lookup(const std::map<std::string, double>& m, const std::string& col, const std::string& q) {
    auto it = m.find(col + "|" + q);
    if (it == m.end()) throw DataError("reference value missing for " + col + " " + q);
    return it->second;
}

Cell rel_cell(const std::string& col, const std::string& q, double computed, double published, double tol) {
    Cell c{col, q, computed, published, std::fabs(computed / published - 1.0), tol, "relative", false};
    c.pass = c.rel_dev <= tol;
    return c;
}

Cell zero_cell(const std::string& col, const std::string& q, double computed, double published) {
    // the published value is simulation noise around an analytically constant quantity
    Cell c{col, q, computed, published, std::fabs(computed), 1e-10, "analytic-zero", false};
    c.pass = std::fabs(computed) < 1e-10;
    return c;
}

struct Column {
    std::string label;
    PreferenceParams prefs;
};

void moment_cells(ReproResult& out, const std::map<std::string, double>& m, const Column& col,
                  const MomentReport& r, double tol_mean, double tol_sd, bool constant_prices) {
    const std::pair<const char*, double> vals[] = {{"rf_mean", r.rf_mean}, {"rf_sd", r.rf_sd},
                                                   {"pd_mean", r.pd_mean}, {"pd_sd", r.pd_sd},
                                                   {"erp_mean", r.erp_mean}, {"erp_sd", r.erp_sd}};
    for (const auto& [q, v] : vals) {
        std::string qs = q;
        double pub = lookup(m, col.label, qs);
        bool is_sd = qs.ends_with("_sd");
        if (constant_prices && (qs == "rf_sd" || qs == "pd_sd"))
            out.cells.push_back(zero_cell(col.label, qs, v, pub));
        else
            out.cells.push_back(rel_cell(col.label, qs, v, pub, is_sd ? tol_sd : tol_mean));
    }
}

PreferenceParams with(const PreferenceParams& base, double theta, double b, double lambda, double gamma) {
    PreferenceParams p = base;
    p.theta = theta;
    p.b = b;
    p.lambda = lambda;
    p.gamma = gamma;
    return p;
}

std::string fmt(double v) { return format_double(v); }

MomentReport run_column(int model, const PreferenceParams& pr, const RunConfig& cfg) {
    ModelSpec spec = cfg.spec();
    spec.model = model;
    auto rows = sweep(pr, cfg.params, spec, "beta", {pr.beta}, cfg.sim);
    return rows.front().report;
}

ReproResult table2(const RunConfig& cfg, const std::vector<ReferenceValue>& ref) {
    ReproResult out;
    out.target = "table2";
    auto m = ref_map(ref, "table2");
    PreferenceParams pr = with(cfg.prefs, 4, 1, 2, 0);
    Model2 model(pr, cfg.params, cfg.rule(), cfg.law);
    double rf_lo = 0, rf_hi = 0;
    for (double e : {0.93, 1.05, 1.17}) {
        std::string col = "eps=" + fmt(e);
        auto p = model.price(MarketState(e, 21.07));
        out.cells.push_back(rel_cell(col, "rf", p.r_f, lookup(m, col, "rf"), 0.05));
        out.cells.push_back(rel_cell(col, "pd", p.pd, lookup(m, col, "pd"), 0.05));
        out.cells.push_back(rel_cell(col, "erp", p.erp, lookup(m, col, "erp"), 0.05));
        if (e == 0.93) rf_lo = p.r_f;
        if (e == 1.17) rf_hi = p.r_f;
    }
    double ratio = rf_lo / rf_hi;
    out.checks["rf_ratio_093_117"] = ratio;
    out.checks["rf_ratio_target"] = 1.48;
    out.checks["pass"] = std::fabs(ratio - 1.48) <= 0.05;
    return out;
}

ReproResult moment_table(const std::string& target, const std::string& ref_target, int model,
                         const std::vector<Column>& cols, double tol_mean, double tol_sd,
                         const RunConfig& cfg, const std::vector<ReferenceValue>& ref) {
    ReproResult out;
    out.target = target;
    auto m = ref_map(ref, ref_target);
    for (const auto& c : cols) {
        MomentReport r = run_column(model, c.prefs, cfg);
        bool constant = model == 2 && (c.prefs.b == 0.0 || c.prefs.lambda == 1.0);
        moment_cells(out, m, c, r, tol_mean, tol_sd, constant);
    }
    return out;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
    return v;
}

ReproResult figure(int which, const RunConfig& cfg) {
    ReproResult out;
    out.target = which == 1 ? "figure1" : "figure2";
    PreferenceParams p1 = with(cfg.prefs, 4, 1, 2, 0.1);
    PreferenceParams p2 = with(cfg.prefs, 4, 1, 2, 0);
    QuadratureRule rule = cfg.rule();
    auto sol = solve_h(p1, cfg.params, rule, make_default_grid(cfg.params, cfg.grid_ne, cfg.grid_ny), cfg.solver);
    Model1 m1(p1, cfg.params, rule, std::move(sol));
    Model2 m2(p2, cfg.params, rule, cfg.law);
    out.series_header = {"model", "x", "rf", "pd", "erp"};
    std::vector<SeriesRow> s1, s2;
    if (which == 1) {
        auto xs = linspace(std::exp(cfg.params.mu_c - 2 * cfg.params.sigma_c),
                           std::exp(cfg.params.mu_c + 2 * cfg.params.sigma_c), 41);
        s1 = conditional_series({&m1, nullptr}, "eps", xs, 21.07);
        s2 = conditional_series({nullptr, &m2}, "eps", xs, 21.07);
        bool below = true, above = true;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            below = below && s1[i].rf < s2[i].rf;
            above = above && s1[i].pd > s2[i].pd;
        }
        out.checks["model1_rf_below_model2"] = below;
        out.checks["model1_pd_above_model2"] = above;
        out.checks["pass"] = below && above;
    } else {
        auto st = stationary_log_y(cfg.params);
        double sd = std::sqrt(st.variance);
        std::vector<double> xs;
        for (double l : linspace(st.mean - 2 * sd, st.mean + 2 * sd, 41)) xs.push_back(std::max(1.0, std::exp(l)));
        s1 = conditional_series({&m1, nullptr}, "y", xs, 1.05);
        s2 = conditional_series({nullptr, &m2}, "y", xs, 1.05);
        double lo = s1[0].rf, hi = s1[0].rf, sum = 0;
        for (const auto& r : s1) {
            lo = std::min(lo, r.rf);
            hi = std::max(hi, r.rf);
            sum += r.rf;
        }
        double rel = (hi - lo) / (sum / static_cast<double>(s1.size()));
        out.checks["model1_rf_range_relative"] = rel;
        out.checks["pass"] = rel < 0.01;
    }
    for (const auto& r : s1) out.series_rows.push_back({1, r.x, r.rf, r.pd, r.erp});
    for (const auto& r : s2) out.series_rows.push_back({2, r.x, r.rf, r.pd, r.erp});
    return out;
}

}  // namespace

ReproResult reproduce(const std::string& target, const RunConfig& cfg, const std::vector<ReferenceValue>& ref) {
    const PreferenceParams& b = cfg.prefs;
    if (target == "table2") return table2(cfg, ref);
    if (target == "table3")
        return moment_table(target, "table3", 1,
                            {{"b=1,lambda=2", with(b, 4, 1, 2, 0.1)},
                             {"b=1.5,lambda=2", with(b, 4, 1.5, 2, 0.1)},
                             {"b=1,lambda=3", with(b, 4, 1, 3, 0.1)},
                             {"b=1.5,lambda=3", with(b, 4, 1.5, 3, 0.1)}},
                            0.05, 0.15, cfg, ref);
    if (target == "table4") {
        std::vector<Column> cols;
        for (double l : {1.0, 1.5, 2.0, 2.5, 3.0}) cols.push_back({"lambda=" + fmt(l), with(b, 4, 1, l, 0)});
        return moment_table(target, "table4", 2, cols, 0.02, 0.10, cfg, ref);
    }
    if (target == "table5") {
        std::vector<Column> cols;
        for (double v : {0.0, 0.5, 1.0, 1.5}) cols.push_back({"b=" + fmt(v), with(b, 4, v, 2, 0)});
        return moment_table(target, "table5", 2, cols, 0.02, 0.10, cfg, ref);
    }
    if (target == "table6") {
        std::vector<Column> cols;
        for (double g : {0.0, 0.05, 0.1, 0.5}) cols.push_back({"gamma=" + fmt(g), with(b, 4, 1, 2, g)});
        return moment_table(target, "table6", 1, cols, 0.05, 0.15, cfg, ref);
    }
    if (target == "table7" || target == "table8") {
        std::vector<Column> cols;
        for (double g : {0.0, 0.01, 0.05, 0.1, 1.0}) cols.push_back({"gamma=" + fmt(g), with(b, 2, 1, 2, g)});
        auto r = moment_table(target, "table8", 1, cols, 0.05, 0.15, cfg, ref);
        return r;
    }
    if (target == "figure1") return figure(1, cfg);
    if (target == "figure2") return figure(2, cfg);
    throw ArgumentError("unknown reproduce target '" + target +
                        "' (expected table2..table8, figure1, figure2)");
}

nlohmann::json to_json(const MomentReport& r) {
    return {{"rf_mean", r.rf_mean}, {"rf_sd", r.rf_sd},   {"pd_mean", r.pd_mean},
            {"pd_sd", r.pd_sd},     {"erp_mean", r.erp_mean}, {"erp_sd", r.erp_sd},
            {"n_paths", r.n_paths}, {"horizon", r.horizon}, {"burn_in", r.burn_in},
            {"seed", r.seed}};
}

nlohmann::json to_json(const ReproResult& r) {
    nlohmann::json j;
    j["target"] = r.target;
    j["pass"] = r.pass();
    j["n_cells"] = r.cells.size();
    j["n_pass"] = r.n_pass();
    j["checks"] = r.checks;
    j["cells"] = nlohmann::json::array();
    for (const auto& c : r.cells)
        j["cells"].push_back({{"column", c.column}, {"quantity", c.quantity}, {"computed", c.computed},
                              {"published", c.published}, {"rel_dev", c.rel_dev},
                              {"tolerance", c.tolerance}, {"rule", c.rule}, {"pass", c.pass}});
    return j;
}

std::string cells_csv(const ReproResult& r) {
    std::ostringstream os;
    if (!r.series_rows.empty()) {
        for (std::size_t i = 0; i < r.series_header.size(); ++i) os << (i ? "," : "") << r.series_header[i];
        os << '\n';
        for (const auto& row : r.series_rows) {
            for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << (i == 0 ? std::to_string(static_cast<int>(row[i])) : fmt(row[i]));
            os << '\n';
        }
        return os.str();
    }
    os << "column,quantity,computed,published,rel_dev,tolerance,rule,pass\n";
    for (const auto& c : r.cells)
        os << '"' << c.column << "\"," << c.quantity << ',' << fmt(c.computed) << ',' << fmt(c.published) << ','
           << fmt(c.rel_dev) << ',' << fmt(c.tolerance) << ',' << c.rule << ',' << (c.pass ? "pass" : "fail")
           << '\n';
    return os.str();
}

}  // namespace lossav
