#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "lossav/config.hpp"

namespace lossav {

struct ReferenceValue {
    std::string target, column, quantity;
    double value;
    std::string comment;
};

std::vector<ReferenceValue> load_reference(const std::string& path);
std::string default_reference_path();

struct Cell {
    std::string column, quantity;
    double computed = 0.0;
    double published = 0.0;
    double rel_dev = 0.0;
    double tolerance = 0.0;
    std::string rule;  // "relative" or "analytic-zero"
    bool pass = false;
};

struct ReproResult {
    std::string target;
    std::vector<Cell> cells;
    std::vector<std::string> series_header;       // figures only
    std::vector<std::vector<double>> series_rows;
    nlohmann::json checks = nlohmann::json::object();
    bool pass() const;
    std::size_t n_pass() const;
};

// Recognised targets: table2..table8, figure1, figure2. Base settings (quadrature, grid,
// simulation panel, seed, dividend law) come from cfg; preference points come from the table.
ReproResult reproduce(const std::string& target, const RunConfig& cfg,
                      const std::vector<ReferenceValue>& ref);

nlohmann::json to_json(const MomentReport& r);
nlohmann::json to_json(const ReproResult& r);
std::string cells_csv(const ReproResult& r);

}  // namespace lossav
