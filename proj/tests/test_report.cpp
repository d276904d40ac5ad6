#include "geco/data.hpp"
#include "geco/report.hpp"

#include <doctest.h>

#include <filesystem>

using namespace geco;

namespace {

TrainTrace sample_trace() {
  TrainTrace t;
  t.records.push_back({0, 1.5, 0.0, 0.001, 0});
  t.records.push_back({1, 0.1, 2.25, 0.002, 2});
  t.records.push_back({2, 1.0 / 3.0, 0.5, 0.003, 3});
  return t;
}

}  // namespace

TEST_SUITE("report") {
  TEST_CASE("trace CSV") {
    const std::string csv = trace_csv(sample_trace(), true);
    CHECK(csv.rfind("iteration,risk,eig_abs,seconds,degree\n0,1.5,0,0.001,0\n1,0.1,2.25,0.002,2\n", 0) == 0);
    const Dataset back = parse_csv(csv, 1);
    CHECK(back.y[2] == 1.0 / 3.0);
    CHECK(trace_csv(sample_trace(), false).find("degree") == std::string::npos);
  }

  TEST_CASE("TikZ coordinates") {
    CHECK(trace_tikz(sample_trace()) == "(0,1.5) (1,0.1) (2,0.3333333333333333)\n");
    CHECK(sgd_tikz({{100, 0.25}, {200, 0.125}}) == "(100,0.25) (200,0.125)\n");
    CHECK(sgd_csv({{100, 0.25}}, "classification_error") == "iteration,classification_error\n100,0.25\n");
  }

  TEST_CASE("JSON trace") {
    const nlohmann::json j = trace_json(sample_trace());
    CHECK(j["records"].size() == 3);
    CHECK(j["records"][2]["risk"].get<double>() == 1.0 / 3.0);
    CHECK(j["records"][1]["step_status"] == "converged");
  }

  TEST_CASE("JSON files") {
    const std::string path = (std::filesystem::temp_directory_path() / "geco_test_report.json").string();
    write_json(path, {{"a", 0.1}, {"b", {1, 2}}});
    const nlohmann::json j = read_json(path);
    CHECK(j["a"].get<double>() == 0.1);
    write_text(path, "{not json");
    CHECK_THROWS_AS(read_json(path), std::invalid_argument);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(read_json(path), std::invalid_argument);
  }
}
