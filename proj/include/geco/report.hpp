#pragma once

#include "geco/baseline.hpp"
#include "geco/geco2.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace geco {

// iteration,risk,eig_abs,seconds[,degree]
std::string trace_csv(const TrainTrace& trace, bool with_degree);
// (iteration,risk) pairs separated by spaces.
std::string trace_tikz(const TrainTrace& trace);
nlohmann::json trace_json(const TrainTrace& trace);

// iteration,<error_kind>
std::string sgd_csv(const std::vector<SgdPoint>& trace, const std::string& error_kind);
std::string sgd_tikz(const std::vector<SgdPoint>& trace);

void write_text(const std::string& path, const std::string& text);
void write_json(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json(const std::string& path);

}  // namespace geco
