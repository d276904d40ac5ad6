#include "geco/report.hpp"

#include "geco/data.hpp"

#include <fstream>
#include <sstream>

namespace geco {

std::string trace_csv(const TrainTrace& trace, bool with_degree) {
  std::ostringstream out;
  out << "iteration,risk,eig_abs,seconds" << (with_degree ? ",degree" : "") << '\n';
  for (const auto& r : trace.records) {
    out << r.iteration << ',' << format_double(r.risk) << ',' << format_double(r.eig_abs) << ','
        << format_double(r.seconds);
    if (with_degree) out << ',' << r.degree;
    out << '\n';
  }
  return out.str();
}

std::string trace_tikz(const TrainTrace& trace) {
  std::ostringstream out;
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    if (i > 0) out << ' ';
    out << '(' << trace.records[i].iteration << ',' << format_double(trace.records[i].risk) << ')';
  }
  out << '\n';
  return out.str();
}

nlohmann::json trace_json(const TrainTrace& trace) {
  nlohmann::json recs = nlohmann::json::array();
  for (const auto& r : trace.records) {
    recs.push_back({{"iteration", r.iteration},
                    {"risk", r.risk},
                    {"eig_abs", r.eig_abs},
                    {"seconds", r.seconds},
                    {"degree", r.degree},
                    {"refit_degraded", r.refit_degraded},
                    {"step_status", to_string(r.step_status)}});
  }
  return {{"records", recs},
          {"theorem_bound", trace.theorem_bound},
          {"theorem_iterations", trace.theorem_iterations},
          {"stopped_early", trace.stopped_early}};
}

std::string sgd_csv(const std::vector<SgdPoint>& trace, const std::string& error_kind) {
  std::ostringstream out;
  out << "iteration," << error_kind << '\n';
  for (const auto& p : trace) out << p.iteration << ',' << format_double(p.error) << '\n';
  return out.str();
}

std::string sgd_tikz(const std::vector<SgdPoint>& trace) {
  std::ostringstream out;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (i > 0) out << ' ';
    out << '(' << trace[i].iteration << ',' << format_double(trace[i].error) << ')';
  }
  out << '\n';
  return out.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot write " + path);
  f << text;
}

void write_json(const std::string& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

nlohmann::json read_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot open " + path);
  try {
    return nlohmann::json::parse(f);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("invalid JSON in " + path + ": " + e.what());
  }
}

}  // namespace geco
