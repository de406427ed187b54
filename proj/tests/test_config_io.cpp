#include <catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qc/config_io.hpp"

using qc::ExperimentParams;
using qc::StudyRow;
using qc::StudyTable;

TEST_CASE("configuration parsing") {
  SECTION("defaults survive an empty file") {
    const ExperimentParams params = qc::parse_config_text("");
    CHECK(params.n_atoms == 2000);
    CHECK(params.cutoff_radius == 3.25);
    CHECK(params.neighbor_range() == 3);
    CHECK(params.residual_tolerance == 1e-12);
    CHECK(params.seed == 0);
    CHECK(params.output_dir == ".");
    CHECK(params.models.size() == 4);
  }

  SECTION("values, comments, and derived neighbor range") {
    const ExperimentParams params = qc::parse_config_text(
        "# convergence study\n"
        "n_atoms = 2000\n"
        "cutoff_radius = 2.5\n"
        "models = qcp, qce\n"
        "m_list = 6, 8, 10\n"
        "residual_tolerance = 1e-11\n"
        "seed = 42\n"
        "output_dir = out\n");
    CHECK(params.neighbor_range() == 2);
    CHECK(params.m_list == std::vector<int>{6, 8, 10});
    CHECK(params.models ==
          std::vector<qc::ModelKind>{qc::ModelKind::Qcp, qc::ModelKind::Qce});
    CHECK(params.residual_tolerance == 1e-11);
    CHECK(params.seed == 42);
    CHECK(params.output_dir == "out");
  }

  SECTION("odd m names the key") {
    CHECK_THROWS_WITH(qc::parse_config_text("m_list = 7\n"),
                      Catch::Matchers::ContainsSubstring("m_list") &&
                          Catch::Matchers::ContainsSubstring("even"));
  }

  SECTION("dof beyond the unknown count names the key") {
    CHECK_THROWS_WITH(qc::parse_config_text("dof_list = 3000\n"),
                      Catch::Matchers::ContainsSubstring("dof_list"));
  }

  SECTION("unknown key") {
    CHECK_THROWS_WITH(qc::parse_config_text("atoms = 10\n"),
                      Catch::Matchers::ContainsSubstring("atoms"));
  }

  SECTION("malformed number names the key") {
    CHECK_THROWS_WITH(qc::parse_config_text("n_atoms = many\n"),
                      Catch::Matchers::ContainsSubstring("n_atoms"));
  }

  SECTION("unknown model name") {
    CHECK_THROWS_WITH(qc::parse_config_text("models = qcq\n"),
                      Catch::Matchers::ContainsSubstring("qcq"));
  }

  SECTION("missing file") {
    CHECK_THROWS_AS(qc::load_config("/nonexistent/config.txt"),
                    std::invalid_argument);
  }
}

namespace {

StudyTable sample_table() {
  StudyTable table;
  table.meta.study = "localized-force";
  table.meta.n_atoms = 400;
  table.meta.cutoff_radius = 3.25;
  table.meta.neighbor_range = 3;
  table.meta.models = {"qcp"};
  table.meta.m_list = {8};
  table.meta.residual_tolerance = 1e-12;
  table.meta.seed = 7;
  table.meta.output_dir = ".";
  StudyRow row;
  row.model = "qcp";
  row.param = 8;
  row.dof = 7;
  row.m = 8;
  row.error = 1.0 / 3.0;
  row.iterations = 4;
  row.converged = true;
  table.rows.push_back(row);
  return table;
}

}  // namespace

TEST_CASE("CSV serialization") {
  SECTION("empty table is header-only") {
    StudyTable table;
    CHECK(qc::to_csv(table) == "model,param,dof,m,error,iterations\n");
  }

  SECTION("row formatting uses 17 significant digits") {
    const StudyTable table = sample_table();
    CHECK(qc::to_csv(table) ==
          "model,param,dof,m,error,iterations\n"
          "qcp,8,7,8,0.33333333333333331,4\n");
  }

  SECTION("files are byte-stable across writes") {
    const StudyTable table = sample_table();
    const std::string path_a = "report_a.csv";
    const std::string path_b = "report_b.csv";
    qc::write_report(table, qc::ReportFormat::Csv, path_a);
    qc::write_report(table, qc::ReportFormat::Csv, path_b);
    std::ifstream in_a(path_a, std::ios::binary);
    std::ifstream in_b(path_b, std::ios::binary);
    std::stringstream buf_a, buf_b;
    buf_a << in_a.rdbuf();
    buf_b << in_b.rdbuf();
    CHECK(buf_a.str() == buf_b.str());
    CHECK(buf_a.str() == qc::to_csv(table));
    std::remove(path_a.c_str());
    std::remove(path_b.c_str());
  }
}

TEST_CASE("JSON serialization round-trips") {
  const StudyTable table = sample_table();
  const nlohmann::json j = qc::to_json(table);
  const nlohmann::json parsed = nlohmann::json::parse(j.dump());
  CHECK(parsed["metadata"]["n_atoms"] == 400);
  CHECK(parsed["metadata"]["neighbor_range"] == 3);
  CHECK(parsed["metadata"]["residual_tolerance"].get<double>() == 1e-12);
  CHECK(parsed["rows"].size() == 1);
  CHECK(parsed["rows"][0]["error"].get<double>() == 1.0 / 3.0);
  CHECK(parsed["rows"][0]["model"] == "qcp");
  CHECK(parsed["rows"][0]["converged"] == true);
}
