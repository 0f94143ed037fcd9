#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dged/cli/commands.hpp"
#include "dged/cli/csv.hpp"
#include "dged/cli/run_config.hpp"

using namespace dged;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("dged_cli_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

fs::path write_json(const fs::path& dir, const std::string& name, const json& doc) {
  const fs::path file = dir / name;
  std::ofstream out(file);
  out << doc.dump(2);
  return file;
}

json base_config() {
  return json{
      {"kernel", {{"name", "constant"}}},
      {"variant", "isolated"},
      {"N", 16},
      {"initial", {{"shape", "monodisperse"}, {"size", 1}, {"amount", 1.0}}},
      {"integrator",
       {{"method", "rk45"}, {"rtol", 1e-9}, {"atol", 1e-12}, {"sample_times", {0.0, 0.5, 1.0}}}},
  };
}

}  // namespace

TEST_CASE("simulate writes a series and a reproducible summary") {
  TempDir dir("simulate");
  json doc = base_config();
  doc["diagnostics"] = {{"sigma", {{"family", "power"}, {"p", 1.5}}},
                        {"lyapunov_profile", {{"type", "ones"}}}};
  const fs::path config = write_json(dir.path, "run.json", doc);

  std::ostringstream diag;
  const int status = cli::cmd_simulate(config, dir.path / "out", diag);
  CAPTURE(diag.str());
  REQUIRE(status == cli::kExitOk);

  // time-series header
  std::ifstream series(dir.path / "out" / "series.csv");
  REQUIRE(series.good());
  std::string header;
  std::getline(series, header);
  CHECK(header.rfind("t,c_0,c_1,", 0) == 0);

  json summary;
  std::ifstream summary_in(dir.path / "out" / "summary.json");
  REQUIRE(summary_in.good());
  summary_in >> summary;

  CHECK(summary.at("p0_drift").get<double>() <= 1e-8);
  CHECK(summary.at("p1_drift").get<double>() <= 1e-8);
  CHECK(summary.at("config").at("kernel").at("name") == "constant");
  CHECK(summary.at("config").at("N") == 16);
  CHECK(summary.at("step_stats").at("accepted").get<long>() > 0);
  CHECK(summary.contains("sigma_moment"));
  CHECK(summary.contains("lyapunov_series"));
  CHECK_FALSE(summary.at("drift_flagged").get<bool>());

  SUBCASE("round-trip: re-reading the CSV reproduces the moment fields bit for bit") {
    const auto states = cli::read_series_csv(dir.path / "out" / "series.csv", Variant::Isolated);
    REQUIRE(states.size() == 3);
    const auto again = cli::summarize_series(
        states, SigmaFunction::power(1.5),
        std::vector<double>(17, 1.0));
    CHECK(again.at("p0_drift") == summary.at("p0_drift"));
    CHECK(again.at("p1_drift") == summary.at("p1_drift"));
    CHECK(again.at("final_moments") == summary.at("final_moments"));
    CHECK(again.at("sigma_moment") == summary.at("sigma_moment"));
    CHECK(again.at("lyapunov_series") == summary.at("lyapunov_series"));
  }
}

TEST_CASE("simulate rejects invalid configs") {
  TempDir dir("badconfig");
  std::ostringstream diag;

  json doc = base_config();
  doc["N"] = 0;
  CHECK(cli::cmd_simulate(write_json(dir.path, "n0.json", doc), dir.path / "out", diag) ==
        cli::kExitConfig);

  doc = base_config();
  doc.erase("integrator");
  CHECK(cli::cmd_simulate(write_json(dir.path, "noint.json", doc), dir.path / "out", diag) ==
        cli::kExitConfig);

  CHECK(cli::cmd_simulate(dir.path / "missing.json", dir.path / "out", diag) == cli::kExitConfig);

  std::ofstream bad(dir.path / "broken.json");
  bad << "{ not json";
  bad.close();
  CHECK(cli::cmd_simulate(dir.path / "broken.json", dir.path / "out", diag) == cli::kExitConfig);
}

TEST_CASE("simulate surfaces kernel-audit failures") {
  TempDir dir("auditfail");
  std::ofstream table(dir.path / "kernel.csv");
  table << "i,j,k,value\n2,1,2,1\n";  // symmetry partner missing
  table.close();

  json doc = base_config();
  doc["kernel"] = {{"name", "table"}, {"path", "kernel.csv"}};
  doc["N"] = 4;
  const fs::path config = write_json(dir.path, "run.json", doc);

  std::ostringstream diag;
  CHECK(cli::cmd_simulate(config, dir.path / "out", diag) == cli::kExitAudit);
  CHECK(diag.str().find("symmetry") != std::string::npos);
}

TEST_CASE("simulate reports integrator aborts") {
  TempDir dir("abort");
  json doc = base_config();
  doc["initial"] = {{"shape", "explicit"},
                    {"values", {0.0, 1e308, 0.0}}};
  doc["N"] = 2;
  const fs::path config = write_json(dir.path, "run.json", doc);
  std::ostringstream diag;
  CHECK(cli::cmd_simulate(config, dir.path / "out", diag) == cli::kExitAbort);
}

TEST_CASE("audit-kernel command") {
  TempDir dir("audit");
  std::ostringstream diag;

  SUBCASE("constant kernel with its certificate passes") {
    json doc = base_config();
    doc["certificate"] = {{"name", "constant_kernel"}};
    const fs::path config = write_json(dir.path, "run.json", doc);
    std::ostringstream out;
    REQUIRE(cli::cmd_audit_kernel(config, 30, dir.path / "out", out, diag) == cli::kExitOk);
    const json report = json::parse(out.str());
    CHECK(report.at("structure").at("passed").get<bool>());
    CHECK(report.at("certificate").at("passed").get<bool>());
    CHECK(fs::exists(dir.path / "out" / "audit.json"));
  }
  SUBCASE("edg product kernel with its certificate passes") {
    json doc = base_config();
    doc["kernel"] = {{"name", "edg_product"}, {"C0", 1.0}};
    doc["certificate"] = {{"name", "edg_product"}, {"C0", 1.0}};
    const fs::path config = write_json(dir.path, "run.json", doc);
    std::ostringstream out;
    CHECK(cli::cmd_audit_kernel(config, 30, {}, out, diag) == cli::kExitOk);
  }
  SUBCASE("null-rule violation is listed with its triple") {
    std::ofstream table(dir.path / "nullrule.csv");
    table << "i,j,k,value\n3,0,3,1\n";
    table.close();
    json doc = base_config();
    doc["kernel"] = {{"name", "table"}, {"path", "nullrule.csv"}};
    const fs::path config = write_json(dir.path, "run.json", doc);
    std::ostringstream out;
    REQUIRE(cli::cmd_audit_kernel(config, 5, {}, out, diag) == cli::kExitAudit);
    const json report = json::parse(out.str());
    REQUIRE_FALSE(report.at("structure").at("passed").get<bool>());
    bool found = false;
    for (const auto& v : report.at("structure").at("violations"))
      if (v.at("i") == 3 && v.at("k") == 3) found = true;
    CHECK(found);
  }
  SUBCASE("certificate failure flips the exit code") {
    json doc = base_config();
    doc["certificate"] = {{"name", "constant_kernel"}, {"alpha", 0.0}};
    const fs::path config = write_json(dir.path, "run.json", doc);
    std::ostringstream out;
    CHECK(cli::cmd_audit_kernel(config, 30, {}, out, diag) == cli::kExitAudit);
  }
}

TEST_CASE("sweep-truncation command") {
  TempDir dir("sweep");
  std::ostringstream diag;

  SUBCASE("complete sweep") {
    json doc = base_config();
    doc["integrator"]["sample_times"] = {1.0};
    const fs::path config = write_json(dir.path, "run.json", doc);
    REQUIRE(cli::cmd_sweep_truncation(config, {8, 16, 32}, dir.path / "out", diag) ==
            cli::kExitOk);
    std::ifstream csv(dir.path / "out" / "sweep.csv");
    REQUIRE(csv.good());
    std::string header;
    std::getline(csv, header);
    CHECK(header == "i,t,N,c,delta_prev");
    std::size_t rows = 0;
    std::string line;
    while (std::getline(csv, line))
      if (!line.empty()) ++rows;
    CHECK(rows == 3 * 9);  // three runs, sizes 0..8, one sample time
  }
  SUBCASE("partial sweep exits 5 and keeps the completed runs") {
    json doc = base_config();
    doc["N"] = 20;
    std::vector<double> spiked(21, 0.0);
    spiked[1] = 1.0;
    spiked[20] = 1e308;
    doc["initial"] = {{"shape", "explicit"}, {"values", spiked}};
    doc["integrator"]["sample_times"] = {1.0};
    const fs::path config = write_json(dir.path, "run.json", doc);
    REQUIRE(cli::cmd_sweep_truncation(config, {16, 32}, dir.path / "out", diag) ==
            cli::kExitPartial);
    std::ifstream csv(dir.path / "out" / "sweep.csv");
    std::string text((std::istreambuf_iterator<char>(csv)), std::istreambuf_iterator<char>());
    CHECK(text.find(",16,") != std::string::npos);
    CHECK(text.find(",32,") == std::string::npos);
  }
  SUBCASE("bad N list") {
    const fs::path config = write_json(dir.path, "run.json", base_config());
    CHECK(cli::cmd_sweep_truncation(config, {16, 8}, dir.path / "out", diag) == cli::kExitConfig);
    CHECK(cli::cmd_sweep_truncation(config, {}, dir.path / "out", diag) == cli::kExitConfig);
  }
}

TEST_CASE("equilibrium command") {
  TempDir dir("equilibrium");
  std::ostringstream diag;

  SUBCASE("single-size profile") {
    json doc = base_config();
    doc["N"] = 1;
    const fs::path config = write_json(dir.path, "run.json", doc);
    std::ostringstream out;
    REQUIRE(cli::cmd_equilibrium(config, 0.5, {}, out, diag) == cli::kExitOk);
    const json result = json::parse(out.str());
    CHECK(result.at("z").get<double>() == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("quadratic root and stationarity") {
    json doc = base_config();
    doc["N"] = 10;
    doc["rho"] = 2.0;
    const fs::path config = write_json(dir.path, "run.json", doc);
    std::ostringstream out;
    REQUIRE(cli::cmd_equilibrium(config, std::nullopt, dir.path / "out", out, diag) ==
            cli::kExitOk);
    const json result = json::parse(out.str());
    CHECK(result.at("detailed_balance").at("max_residual").get<double>() == 0.0);
    CHECK(result.at("rhs_max_norm").get<double>() <=
          1e-12 * result.at("flux_scale").get<double>());
    CHECK(fs::exists(dir.path / "out" / "equilibrium.json"));
  }
  SUBCASE("z = 1 solves z + 2z^2 = 3") {
    json doc = base_config();
    doc["N"] = 2;
    const fs::path config = write_json(dir.path, "run.json", doc);
    std::ostringstream out;
    REQUIRE(cli::cmd_equilibrium(config, 3.0, {}, out, diag) == cli::kExitOk);
    CHECK(json::parse(out.str()).at("z").get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("missing or unbracketable rho") {
    const fs::path config = write_json(dir.path, "run.json", base_config());
    std::ostringstream out;
    CHECK(cli::cmd_equilibrium(config, std::nullopt, {}, out, diag) == cli::kExitConfig);
    CHECK(cli::cmd_equilibrium(config, 1e308, {}, out, diag) == cli::kExitConfig);
  }
}

TEST_CASE("geometric non-isolated run end to end") {
  TempDir dir("geometric");
  json doc = base_config();
  doc["variant"] = "non_isolated";
  doc["bath"] = 0.5;
  doc["initial"] = {{"shape", "geometric"}, {"ratio", 0.5}, {"amount", 1.0}};
  const fs::path config = write_json(dir.path, "run.json", doc);
  std::ostringstream diag;
  REQUIRE(cli::cmd_simulate(config, dir.path / "out", diag) == cli::kExitOk);

  const auto states = cli::read_series_csv(dir.path / "out" / "series.csv", Variant::NonIsolated);
  REQUIRE_FALSE(states.empty());
  for (const auto& state : states) CHECK(state.values[0] == 0.5);  // bath pinned throughout

  json summary;
  std::ifstream in(dir.path / "out" / "summary.json");
  in >> summary;
  CHECK(summary.at("p1_drift").get<double>() <= 1e-8);
}

TEST_CASE("csv float formatting round-trips") {
  for (double v : {0.0, 1.0, 1.0 / 3.0, 6.02e23, 1e-300, 0.1 + 0.2}) {
    CHECK(cli::parse_double(cli::format_double(v)) == v);
  }
}

TEST_CASE("config echo resolves bath defaults from the kernel") {
  TempDir dir("bath");
  json doc = base_config();
  doc["kernel"] = {{"name", "coagfrag_constant"}, {"a0", 2.0}, {"b0", 0.0}, {"c00", 1.0}};
  doc["variant"] = "non_isolated";
  const fs::path config = write_json(dir.path, "run.json", doc);
  const cli::RunConfig loaded = cli::load_run_config(config);
  CHECK(loaded.bath == 1.0);
  CHECK(loaded.echo.at("bath").get<double>() == 1.0);

  SUBCASE("a disagreeing bath is rejected") {
    doc["bath"] = 2.0;
    const fs::path bad = write_json(dir.path, "bad.json", doc);
    CHECK_THROWS_AS(cli::load_run_config(bad), cli::ConfigError);
  }
}
