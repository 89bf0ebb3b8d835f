#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "rch/run.hpp"

using namespace rch;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"({
  "system": "rigid_body",
  "params": {"inertia": [1, 2, 3]},
  "initial_state": {"pi": [1, 1, 1]},
  "integrator": {"method": "rk4", "step": 1e-3, "t_final": 10}
})";

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("rch_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::vector<double> column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    const auto j = static_cast<std::size_t>(it - header.begin());
    std::vector<double> out;
    for (const auto& r : rows) out.push_back(r.at(j));
    return out;
  }
};

Csv read_csv(const fs::path& p) {
  std::ifstream in(p);
  Csv csv;
  std::string line;
  std::getline(in, line);
  std::stringstream hs(line);
  for (std::string cell; std::getline(hs, cell, ',');) csv.header.push_back(cell);
  while (std::getline(in, line)) {
    std::stringstream rs(line);
    std::vector<double> row;
    for (std::string cell; std::getline(rs, cell, ',');) row.push_back(std::strtod(cell.c_str(), nullptr));
    csv.rows.push_back(row);
  }
  return csv;
}

std::string parse_error_message(const std::string& text, ErrorKind expected) {
  try {
    parse_scenario(text);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), expected) << e.what();
    return e.detail();
  }
  ADD_FAILURE() << "expected an error";
  return {};
}

std::string with(const std::string& base, const std::string& from, const std::string& to) {
  std::string s = base;
  const auto at = s.find(from);
  EXPECT_NE(at, std::string::npos) << from;
  s.replace(at, from.size(), to);
  return s;
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(RCHSIM_PATH) + " --quiet " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<fs::path> corpus() {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(SCENARIO_DIR)) {
    if (e.path().extension() == ".json") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(ParseScenario, MinimalRigidBody) {
  const ScenarioConfig c = parse_scenario(kMinimal);
  EXPECT_EQ(c.system, ScenarioSystem::RigidBody);
  EXPECT_EQ(c.params.inertia, Vec3(1, 2, 3));
  EXPECT_EQ(c.initial.pi, Vec3(1, 1, 1));
  EXPECT_EQ(c.integrator.method, Method::RK4);
  EXPECT_EQ(c.integrator.steps(), 10000u);
  EXPECT_FALSE(c.control.has_value());
}

TEST(ParseScenario, ValidationMessages) {
  std::string m = parse_error_message(with(kMinimal, "\"rigid_body\"", "\"rigid_bdy\""),
                                      ErrorKind::ValidationError);
  EXPECT_EQ(m.rfind("system ", 0), 0u) << m;
  for (const char* name : {"rigid_body", "rigid_body_torque", "rigid_body_rotors", "heavy_top",
                           "heavy_top_rotors", "rigid_body_full"}) {
    EXPECT_NE(m.find(name), std::string::npos) << name;
  }
  m = parse_error_message(with(kMinimal, "\"step\": 1e-3", "\"step\": -0.1"), ErrorKind::ValidationError);
  EXPECT_EQ(m, "integrator.step must be > 0");

  const std::string ht = R"({
    "system": "heavy_top",
    "params": {"inertia": [1, 2, 3], "mgh": 1, "chi": [1, 1, 0]},
    "initial_state": {"pi": [1, 1, 1], "gamma": [0, 0, 1]},
    "integrator": {"step": 1e-3, "t_final": 1}
  })";
  m = parse_error_message(ht, ErrorKind::ValidationError);
  EXPECT_NE(m.find("chi must be unit length"), std::string::npos) << m;

  const std::string ctl = with(with(ht, "[1, 1, 0]", "[0, 0, 1]"), "\"integrator\"",
                               "\"control\": {\"kind\": \"rotor_gain\", \"k\": 0.5}, \"integrator\"");
  m = parse_error_message(ctl, ErrorKind::ValidationError);
  EXPECT_NE(m.find("control 'rotor_gain' not admissible for system 'heavy_top'"), std::string::npos) << m;

  m = parse_error_message(with(kMinimal, "\"pi\": [1, 1, 1]", "\"pi\": [1, 1]"), ErrorKind::ValidationError);
  EXPECT_NE(m.find("initial_state.pi"), std::string::npos) << m;
  m = parse_error_message(with(kMinimal, "\"inertia\"", "\"inertia\": [1, 2, 3], \"mgh\""),
                          ErrorKind::ValidationError);
  EXPECT_NE(m.find("params.mgh is not a recognized field"), std::string::npos) << m;
  m = parse_error_message(with(kMinimal, "[1, 2, 3]", "[1, 0, 3]"), ErrorKind::ValidationError);
  EXPECT_NE(m.find("params"), std::string::npos) << m;
}

TEST(ParseScenario, MalformedDocumentReportsPosition) {
  const std::string m = parse_error_message("{\n  \"system\": \"rigid_body\",\n  oops\n}", ErrorKind::ParseError);
  EXPECT_EQ(m.rfind("line 3, column", 0), 0u) << m;
}

TEST(ParseScenario, CorpusRoundTrip) {
  const auto files = corpus();
  ASSERT_GE(files.size(), 8u);
  std::set<ScenarioSystem> seen;
  for (const fs::path& f : files) {
    const ScenarioConfig c = load_scenario(f.string());
    seen.insert(c.system);
    const ScenarioConfig again = parse_scenario(to_json(c).dump());
    EXPECT_TRUE(again == c) << f;
    EXPECT_EQ(to_json(again), to_json(c)) << f;
  }
  EXPECT_EQ(seen.size(), 6u);
}

TEST(RunSimulation, FreeRigidBodyCsvAndSummary) {
  const fs::path dir = scratch("free_rb");
  ScenarioConfig c = parse_scenario(kMinimal);
  c.outputs.diagnostics = {"energy", "casimir_1"};
  RunOptions opts;
  opts.out_dir = dir.string();
  opts.quiet = true;
  opts.stem = "free";
  const RunSummary s = run_simulation(c, opts);
  const Csv csv = read_csv(dir / "free.csv");
  EXPECT_EQ(csv.header, (std::vector<std::string>{"t", "Pi_1", "Pi_2", "Pi_3", "energy", "casimir_1"}));
  EXPECT_EQ(csv.rows.size(), 10001u);

  const Json summary = Json::parse(read_file(dir / "free.summary.json"));
  EXPECT_EQ(summary["scenario"], to_json(c));
  for (const char* name : {"energy", "casimir_1"}) {
    const auto col = csv.column(name);
    double drift = 0.0;
    for (double v : col) drift = std::max(drift, std::abs(v - col.front()));
    EXPECT_EQ(summary["diagnostics"][name]["drift"].get<double>(), drift) << name;
    EXPECT_EQ(summary["diagnostics"][name]["initial"].get<double>(), col.front());
  }
  EXPECT_LT(summary["diagnostics"]["energy"]["drift"].get<double>(), 1e-10);
  EXPECT_EQ(summary["final_state"]["Pi_1"].get<double>(), csv.rows.back()[1]);
  EXPECT_EQ(s.steps, 10000u);
}

TEST(RunSimulation, HeavyTopSplittingSummary) {
  const fs::path dir = scratch("ht");
  const ScenarioConfig c = load_scenario(std::string(SCENARIO_DIR) + "/ht_splitting.json");
  RunOptions opts;
  opts.out_dir = dir.string();
  opts.quiet = true;
  const RunSummary s = run_simulation(c, opts);
  for (const DiagnosticStats& d : s.diagnostics) {
    if (d.name == "casimir_1" || d.name == "casimir_2") EXPECT_LT(d.drift, 1e-12) << d.name;
  }
  EXPECT_TRUE(s.all_passed());
}

TEST(RunEquivalence, EmbedsCheckReport) {
  const fs::path dir = scratch("eq");
  const ScenarioConfig c = load_scenario(std::string(SCENARIO_DIR) + "/equiv_rb_torque_vs_rotor.json");
  RunOptions opts;
  opts.out_dir = dir.string();
  opts.quiet = true;
  opts.stem = "eq";
  const RunSummary s = run_equivalence(c, opts);
  const CheckReport direct = check_equivalence(c.equivalence->spec, c.equivalence->samples,
                                               c.equivalence->tolerance, opts.seed);
  ASSERT_EQ(s.checks.size(), 2u);
  EXPECT_EQ(s.checks[0].observed, direct.observed);
  EXPECT_TRUE(s.checks[1].passed);
  const Json summary = Json::parse(read_file(dir / "eq.equivalence.json"));
  EXPECT_EQ(summary["checks"][0]["name"], direct.name);
  EXPECT_EQ(summary["checks"][0]["observed"].get<double>(), direct.observed);
}

TEST(RunPort, MeasuredOrder) {
  const fs::path dir = scratch("port");
  const ScenarioConfig c = load_scenario(std::string(SCENARIO_DIR) + "/port_constant_torque.json");
  RunOptions opts;
  opts.out_dir = dir.string();
  opts.quiet = true;
  const RunSummary s = run_port(c, opts);
  ASSERT_FALSE(s.checks.empty());
  EXPECT_TRUE(s.checks[0].passed) << s.checks[0].context;
}

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch("exit");
  const std::string out = "--out-dir " + dir.string() + " ";
  const std::string data = TEST_DATA_DIR;
  EXPECT_EQ(run_binary(out + "simulate " + std::string(SCENARIO_DIR) + "/rb_free_splitting.json"), 0);
  EXPECT_EQ(run_binary(out + "simulate " + data + "/invalid_system.json"), 2);
  EXPECT_EQ(run_binary(out + "simulate " + data + "/negative_step.json"), 2);
  EXPECT_EQ(run_binary(out + "simulate " + data + "/malformed.json"), 2);
  EXPECT_EQ(run_binary(out + "simulate " + data + "/inadmissible_control.json"), 2);
  EXPECT_EQ(run_binary(out + "simulate " + data + "/overflow.json"), 3);
  EXPECT_EQ(run_binary(out + "verify " + data + "/failing_check.json"), 4);
  EXPECT_EQ(run_binary(out + "verify no_such_suite"), 2);
  EXPECT_EQ(run_binary(out + "bogus"), 2);
  EXPECT_EQ(run_binary(out + "simulate " + dir.string() + "/missing.json"), 1);
  EXPECT_EQ(run_binary(out + "equivalence " + std::string(SCENARIO_DIR) + "/rb_free_rk4.json"), 2);
  EXPECT_EQ(run_binary(out + "--seed 99 verify equivalence"), 0);
}
