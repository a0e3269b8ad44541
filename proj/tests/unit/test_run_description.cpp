#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "spinnet/errors.hpp"
#include "spinnet/run_description.hpp"

using namespace spinnet;

namespace {

const char* kStarRun = R"json({
  "network": {
    "sites": [{"id": 0, "twice_spin": 1}, {"id": 1, "twice_spin": 1}, {"id": 2, "twice_spin": 1},
              {"id": 3, "twice_spin": 1}, {"id": 4, "twice_spin": 1}, {"id": 5, "twice_spin": 1},
              {"id": 6, "twice_spin": 1}],
    "edges": [{"a": 0, "b": 1, "coupling": 1.0}, {"a": 1, "b": 2, "coupling": 1.0},
              {"a": 0, "b": 3, "coupling": 1.0}, {"a": 3, "b": 4, "coupling": 1.0},
              {"a": 0, "b": 5, "coupling": 1.0}, {"a": 5, "b": 6, "coupling": 1.0}]
  },
  "schedule": {
    "T": 10.0,
    "profiles": [
      {"a": 0, "b": 1, "profile": "ramp_on"},
      {"a": 0, "b": 3, "profile": "ramp_on"},
      {"a": 0, "b": 5, "profile": "ramp_on"},
      {"a": 1, "b": 2, "profile": "ramp_off"}
    ],
    "checkpoints": [2.5]
  },
  "protocol": {
    "kind": "transfer",
    "parties": {"alice": [0], "bob": [2]},
    "sender": "alice",
    "receiver": "bob",
    "twice_s": 1
  },
  "task": {"k": 4, "n_samples": 11}
})json";

}  // namespace

TEST_CASE("run description parsing") {
  const RunDescription rd = parse_run_description_text(kStarRun);
  REQUIRE(rd.network.has_value());
  REQUIRE(rd.schedule.has_value());
  REQUIRE(rd.protocol.has_value());
  CHECK(rd.network->site_count() == 7);
  CHECK(rd.schedule->total_time() == 10.0);
  // ramp amplitude defaults to the edge's base coupling
  CHECK(rd.schedule->couplings_at(10.0).at(EdgeKey(0, 1)) == doctest::Approx(1.0));
  CHECK(rd.schedule->couplings_at(0.0).at(EdgeKey(1, 2)) == 1.0);
  // unlisted edges stay constant
  CHECK(rd.schedule->couplings_at(0.0).at(EdgeKey(3, 4)) == 1.0);
  // user checkpoint merged
  bool has_user_checkpoint = false;
  for (double t : rd.schedule->checkpoints())
    if (t == 2.5) has_user_checkpoint = true;
  CHECK(has_user_checkpoint);
  CHECK(rd.protocol->kind == ProtocolSpec::Kind::Transfer);
  CHECK(rd.protocol->s == HalfInt(1));
  CHECK(rd.protocol->party("alice") == std::vector<int>{0});
  CHECK(rd.task.k == 4);
  CHECK(rd.task.n_samples == 11);
  CHECK(rd.task.steps == 0);

  const ProtocolReport report = verify(*rd.protocol, *rd.schedule);
  CHECK(report.pass);
}

TEST_CASE("malformed run descriptions are input errors") {
  CHECK_THROWS_AS(parse_run_description_text("not json"), InvalidInputError);
  CHECK_THROWS_AS(parse_run_description_text(R"({"network": {"sites": []}})"),
                  InvalidInputError);
  CHECK_THROWS_AS(parse_run_description_text(
                      R"({"network": {"sites": [{"id": 0, "twice_spin": 1}], "edges": []},
                          "schedule": {"T": 1e999}})"),
                  InvalidInputError);
  CHECK_THROWS_AS(
      parse_run_description_text(R"({"schedule": {"T": 1.0}})"),
      InvalidInputError);  // schedule without network
  CHECK_THROWS_AS(parse_run_description_text(
                      R"({"network": {"sites": [{"id": 0, "twice_spin": 1},
                                                {"id": 1, "twice_spin": 1}],
                                      "edges": [{"a": 0, "b": 1, "coupling": 1.0}]},
                          "protocol": {"kind": "warp"}})"),
                  InvalidInputError);
  CHECK_THROWS_AS(parse_run_description("/nonexistent/file.json"), InvalidInputError);
}

TEST_CASE("cg command prints the multiplicity") {
  std::ostringstream out;
  CHECK(cmd_cg({1, 1, 1, 1}, 0, out) == 0);
  CHECK(out.str() == "2\n");
  std::ostringstream out2;
  CHECK(cmd_cg({1, 1, 1}, 0, out2) == 0);
  CHECK(out2.str() == "0\n");
  std::ostringstream bad;
  CHECK(cmd_cg({-1}, 0, bad) == 2);
}

TEST_CASE("number formatting is plain and deterministic") {
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(1e-9) == "1e-09");
  const std::uint64_t d1 = fnv1a64("abc");
  const std::uint64_t d2 = fnv1a64("abc");
  const std::uint64_t d3 = fnv1a64("abd");
  CHECK(d1 == d2);
  CHECK(d1 != d3);
}

namespace {

struct TempFile {
  std::filesystem::path path;
  explicit TempFile(const std::string& name, const std::string& content)
      : path(std::filesystem::temp_directory_path() / name) {
    std::ofstream out(path);
    out << content;
  }
  ~TempFile() { std::filesystem::remove(path); }
  std::string str() const { return path.string(); }
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kFailureChain = R"json({
  "network": {
    "sites": [{"id": 1, "twice_spin": 1}, {"id": 2, "twice_spin": 1}, {"id": 3, "twice_spin": 1},
              {"id": 4, "twice_spin": 1}, {"id": 5, "twice_spin": 1}],
    "edges": [{"a": 1, "b": 2, "coupling": 1.0}, {"a": 2, "b": 3, "coupling": 1.0},
              {"a": 3, "b": 4, "coupling": 1.0}, {"a": 4, "b": 5, "coupling": 1.0}]
  },
  "schedule": {
    "T": 10.0,
    "profiles": [
      {"a": 1, "b": 2, "profile": "ramp_on"},
      {"a": 3, "b": 4, "profile": "ramp_off"},
      {"a": 4, "b": 5, "profile": "ramp_off"}
    ]
  },
  "protocol": {
    "kind": "transfer",
    "parties": {"p1": [1], "p2": [4]},
    "sender": "p1", "receiver": "p2", "twice_s": 1
  }
})json";

}  // namespace

TEST_CASE("check command writes a machine-readable report") {
  TempFile run("spinnet_test_failure.json", kFailureChain);
  TempFile report("spinnet_test_report.json", "");
  CliOptions options;
  options.output = report.str();
  std::ostringstream out;
  CHECK(cmd_check(run.str(), options, out) == 1);
  CHECK(out.str().find("FAIL") != std::string::npos);
  CHECK(out.str().find("NOT COMPATIBLE") != std::string::npos);
  const std::string json_text = slurp(report.path);
  CHECK(json_text.find("\"verdict\": \"fail\"") != std::string::npos);
  CHECK(json_text.find("\"multiplicity\": 2") != std::string::npos);
}

TEST_CASE("spectrum command reports the closing gap of the violating chain") {
  TempFile run("spinnet_test_failure2.json", kFailureChain);
  TempFile csv("spinnet_test_spectrum.csv", "");
  CliOptions options;
  options.output = csv.str();
  options.k = 4;
  options.samples = 11;
  std::ostringstream out;
  CHECK(cmd_spectrum(run.str(), options, out) == 0);
  const std::string text = slurp(csv.path);
  CHECK(text.find("# spinnet") != std::string::npos);
  CHECK(text.find("time,E_0,E_1,E_2,E_3,gap") != std::string::npos);
  // last row: time 1, gap ~ 0
  const auto last_line_start = text.rfind('\n', text.size() - 2);
  const std::string last = text.substr(last_line_start + 1);
  CHECK(last.substr(0, 2) == "1,");
  const double final_gap = std::stod(last.substr(last.rfind(',') + 1));
  CHECK(final_gap < 1e-9);
}

TEST_CASE("evolve command handles every protocol kind") {
  CliOptions options;
  SUBCASE("entanglement") {
    TempFile run("spinnet_test_ent.json", R"json({
      "network": {
        "sites": [{"id": 1, "twice_spin": 1}, {"id": 2, "twice_spin": 1},
                  {"id": 3, "twice_spin": 1}, {"id": 4, "twice_spin": 1}],
        "edges": [{"a": 1, "b": 2, "coupling": 1.0}, {"a": 2, "b": 3, "coupling": 1.0},
                  {"a": 3, "b": 4, "coupling": 1.0}]
      },
      "schedule": {
        "T": 30.0,
        "profiles": [{"a": 1, "b": 2, "profile": "ramp_off"},
                     {"a": 3, "b": 4, "profile": "ramp_off"}]
      },
      "protocol": {"kind": "entanglement", "parties": {"p1": [1], "p2": [4]},
                   "sender": "p1", "receiver": "p2", "twice_s": 1}
    })json");
    std::ostringstream out;
    CHECK(cmd_evolve(run.str(), options, out) == 0);
    CHECK(out.str().find("final error") != std::string::npos);
    const auto pos = out.str().find("final error = ");
    const double err = std::stod(out.str().substr(pos + 14));
    CHECK(err < 0.05);
  }
  SUBCASE("initialization") {
    TempFile run("spinnet_test_init.json", R"json({
      "network": {
        "sites": [{"id": 1, "twice_spin": 1}, {"id": 2, "twice_spin": 1},
                  {"id": 3, "twice_spin": 1}, {"id": 4, "twice_spin": 1}],
        "edges": [{"a": 1, "b": 2, "coupling": 1.0}, {"a": 2, "b": 3, "coupling": 1.0},
                  {"a": 3, "b": 4, "coupling": 1.0}]
      },
      "schedule": {
        "T": 30.0,
        "profiles": [{"a": 2, "b": 3, "profile": "ramp_on"}]
      },
      "protocol": {"kind": "initialization", "twice_s": 0}
    })json");
    std::ostringstream out;
    CHECK(cmd_evolve(run.str(), options, out) == 0);
    const auto pos = out.str().find("final error = ");
    const double err = std::stod(out.str().substr(pos + 14));
    CHECK(err < 0.01);
  }
}

TEST_CASE("sweep command flags bad rows and honors empty grids") {
  SUBCASE("one failing instance leaves exit code 0 with a warning") {
    TempFile run("spinnet_test_sweep_bad.json",
                 R"json({"task": {"arm_counts": [2], "arm_length": 1, "t_grid": [4.0]}})json");
    TempFile csv("spinnet_test_sweep_bad.csv", "");
    CliOptions options;
    options.output = csv.str();
    std::ostringstream out;
    CHECK(cmd_sweep(run.str(), options, out) == 0);
    CHECK(out.str().find("1 warnings") != std::string::npos);
    CHECK(slurp(csv.path).find("error:") != std::string::npos);
  }
  SUBCASE("explicitly empty grid produces a header-only table") {
    TempFile run("spinnet_test_sweep_empty.json", R"json({"task": {"t_grid": []}})json");
    TempFile csv("spinnet_test_sweep_empty.csv", "");
    CliOptions options;
    options.output = csv.str();
    std::ostringstream out;
    CHECK(cmd_sweep(run.str(), options, out) == 0);
    const std::string text = slurp(csv.path);
    CHECK(text.find("M,K,T,error,min_gap,steps,status") != std::string::npos);
    // exactly two lines: the comment and the header
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);
  }
}
