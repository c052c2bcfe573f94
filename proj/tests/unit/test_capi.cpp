#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "panelselect.h"

namespace fs = std::filesystem;

namespace {

std::string scratch_dir() {
  fs::path dir = fs::temp_directory_path() / "panelselect_capi_tests";
  fs::create_directories(dir);
  return dir.string();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string tiny_config(const std::string& out_dir,
                        const std::string& panel_csv = "") {
  std::ostringstream os;
  os << R"({
  "schema_version": 1,
  "seed": 20240601,
  "output": {"dir": ")"
     << out_dir << R"("},
  "input": {"panel_csv": ")" << panel_csv << R"("},
  "model": {
    "z_vars": ["zc"],
    "x_vars": ["xc"],
    "w_vars": ["wc"]
  },
  "dgp": {
    "n": 150, "t_max": 3,
    "theta": [0.8, 0.4], "alpha": [0.3, 0.6], "beta": [1.5, 0.7],
    "s1": 0.4, "s2": 0.4, "s3": 0.8,
    "sigma13": 0.4, "sigma23": 0.32, "sd_u3": 0.8, "sd_v3": 0.5,
    "covariates": [
      {"name": "zc", "in_z": true},
      {"name": "xc", "in_x": true},
      {"name": "wc", "in_w": true}
    ]
  },
  "estimation": {"r_draws": 8, "max_iter": 200, "gtol": 1e-4},
  "describe": {"variables": ["zc", "employed"], "bootstrap_b": 30}
})";
  return os.str();
}

}  // namespace

TEST_CASE("version and error-code mapping") {
  CHECK(std::string(ps_version()) == "0.1.0");
  CHECK(ps_status_exit_code(PS_OK) == 0);
  CHECK(ps_status_exit_code(PS_ERR_CONFIG) == 1);
  CHECK(ps_status_exit_code(PS_ERR_VALIDATION) == 1);
  CHECK(ps_status_exit_code(PS_ERR_IO) == 1);
  CHECK(ps_status_exit_code(PS_ERR_NUMERIC) == 2);
  CHECK(ps_status_exit_code(PS_ERR_NOT_IDENTIFIED) == 2);
  CHECK(ps_status_exit_code(PS_ERR_NO_CONVERGENCE) == 2);
}

TEST_CASE("config loading and overrides") {
  ps_config* config = nullptr;
  CHECK(ps_config_load_string("{ not json", &config) == PS_ERR_CONFIG);
  CHECK(std::string(ps_last_error()).size() > 0);

  CHECK(ps_config_load_string(R"({"schema_version": 1})", &config) ==
        PS_ERR_CONFIG);  // missing seed

  REQUIRE(ps_config_load_string(tiny_config("unused").c_str(), &config) ==
          PS_OK);
  CHECK(ps_config_set_string(config, "output.dir", "elsewhere") == PS_OK);
  CHECK(ps_config_set_int(config, "seed", 7) == PS_OK);
  CHECK(ps_config_set_int(config, "estimation.bootstrap_b", 60) == PS_OK);
  ps_config_free(config);

  CHECK(ps_config_load("/does/not/exist.json", &config) == PS_ERR_IO);
  CHECK(ps_config_load(nullptr, &config) == PS_ERR_INVALID_ARGUMENT);
}

TEST_CASE("full pipeline through the C API is deterministic") {
  std::string base = scratch_dir();
  std::string dir_a = base + "/run_a";
  std::string dir_b = base + "/run_b";
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);

  for (const std::string& dir : {dir_a, dir_b}) {
    ps_config* config = nullptr;
    std::string cfg = tiny_config(dir, dir + "/panel.csv");
    REQUIRE(ps_config_load_string(cfg.c_str(), &config) == PS_OK);

    char* summary = nullptr;
    REQUIRE_MESSAGE(ps_run_simulate(config, &summary) == PS_OK,
                    ps_last_error());
    ps_string_free(summary);
    REQUIRE(fs::exists(dir + "/panel.csv"));
    REQUIRE(fs::exists(dir + "/truth.json"));

    REQUIRE_MESSAGE(ps_run_estimate(config, 0, &summary) == PS_OK,
                    ps_last_error());
    ps_string_free(summary);
    REQUIRE(fs::exists(dir + "/estimate.json"));
    REQUIRE(fs::exists(dir + "/stage1_table.txt"));
    REQUIRE(fs::exists(dir + "/stage1_table.csv"));
    REQUIRE(fs::exists(dir + "/stage2_table.csv"));
    REQUIRE(fs::exists(dir + "/diagnostics.csv"));

    REQUIRE_MESSAGE(ps_run_report(config, &summary) == PS_OK, ps_last_error());
    ps_string_free(summary);
    REQUIRE(fs::exists(dir + "/report_table.txt"));

    REQUIRE_MESSAGE(ps_run_describe(config, &summary) == PS_OK,
                    ps_last_error());
    ps_string_free(summary);
    REQUIRE(fs::exists(dir + "/describe_table.csv"));
    ps_config_free(config);
  }

  for (const char* name :
       {"panel.csv", "truth.json", "estimate.json", "stage1_table.txt",
        "stage1_table.csv", "stage2_table.txt", "stage2_table.csv",
        "diagnostics.csv", "report_table.txt", "report_table.csv",
        "describe_table.csv"}) {
    CHECK_MESSAGE(read_file(dir_a + "/" + name) ==
                      read_file(dir_b + "/" + name),
                  "file differs between reruns: " << name);
  }
}

TEST_CASE("panel handle surface") {
  std::string base = scratch_dir();
  std::string csv_path = base + "/toy_panel.csv";
  write_file(csv_path,
             "person_id,wave,responded,employed,log_wage,weight\n"
             "a,1,1,1,2.5,1\n"
             "a,2,1,0,,1\n"
             "b,1,1,1,2.7,1\n");
  ps_panel* panel = nullptr;
  REQUIRE(ps_panel_load_csv(csv_path.c_str(), &panel) == PS_OK);
  CHECK(ps_panel_num_rows(panel) == 3);
  CHECK(ps_panel_num_persons(panel) == 2);
  CHECK(ps_panel_t_max(panel) == 2);
  char* report = nullptr;
  REQUIRE(ps_panel_validate(panel, &report) == PS_OK);
  CHECK(std::string(report).empty());
  ps_string_free(report);
  ps_panel_free(panel);

  CHECK(ps_panel_load_csv("/missing/file.csv", &panel) == PS_ERR_IO);

  std::string bad_path = base + "/bad_panel.csv";
  write_file(bad_path,
             "person_id,wave,employed,log_wage,weight\n"
             "a,1,1,2.5,1\n");
  CHECK(ps_panel_load_csv(bad_path.c_str(), &panel) == PS_ERR_SCHEMA);

  std::string dup_path = base + "/dup_panel.csv";
  write_file(dup_path,
             "person_id,wave,responded,employed,log_wage,weight\n"
             "7,1,1,1,2.5,1\n"
             "7,1,1,0,,1\n");
  CHECK(ps_panel_load_csv(dup_path.c_str(), &panel) == PS_ERR_INTEGRITY);
}

TEST_CASE("estimation failures map to validation or numeric classes") {
  std::string base = scratch_dir();

  SUBCASE("validation violations refuse the run with exit class 1") {
    std::string csv_path = base + "/invalid_panel.csv";
    // non-absorbing response pattern plus covariates for the model block
    write_file(csv_path,
               "person_id,wave,responded,employed,log_wage,weight,zc,xc,wc\n"
               "a,1,1,1,2.0,1,0.1,0.2,0.3\n"
               "a,2,0,,,1,,,\n"
               "a,3,1,1,2.1,1,0.1,0.2,0.3\n");
    ps_config* config = nullptr;
    std::string cfg = tiny_config(base + "/invalid_out", csv_path);
    REQUIRE(ps_config_load_string(cfg.c_str(), &config) == PS_OK);
    ps_status status = ps_run_estimate(config, 0, nullptr);
    CHECK(status == PS_ERR_VALIDATION);
    CHECK(ps_status_exit_code(status) == 1);
    CHECK(std::string(ps_last_error()).find("non-absorbing") !=
          std::string::npos);
    ps_config_free(config);
  }

  SUBCASE("degenerate all-employed data fails with exit class 2") {
    std::string csv_path = base + "/degenerate_panel.csv";
    std::ostringstream csv;
    csv << "person_id,wave,responded,employed,log_wage,weight,zc,xc,wc\n";
    for (int i = 0; i < 40; ++i) {
      csv << "p" << 100 + i << ",1,1,1,2.0,1,0.5,0.5,0.5\n";
      csv << "p" << 100 + i << ",2,1,1,2.1,1,0.6,0.6,0.6\n";
    }
    write_file(csv_path, csv.str());
    ps_config* config = nullptr;
    std::string cfg = tiny_config(base + "/degenerate_out", csv_path);
    REQUIRE(ps_config_load_string(cfg.c_str(), &config) == PS_OK);
    ps_status status = ps_run_estimate(config, 0, nullptr);
    CHECK(status == PS_ERR_NOT_IDENTIFIED);
    CHECK(ps_status_exit_code(status) == 2);
    ps_config_free(config);
  }
}
