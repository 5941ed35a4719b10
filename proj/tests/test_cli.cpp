#include <doctest.h>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "ehpc/cli/config.hpp"
#include "ehpc/cli/emit.hpp"

using namespace ehpc;
using namespace ehpc::cli;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("ehpc_cli_test_" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::vector<std::string> read_lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string cell; std::getline(ss, cell, ',');) out.push_back(cell);
  return out;
}

double parse_double(const std::string& s) {
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  REQUIRE(res.ec == std::errc{});
  return x;
}

std::string key_of_error(const std::string& text, std::vector<std::string> overrides = {}) {
  try {
    parse_config_text(text, overrides);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<no error>";
}

}  // namespace

TEST_CASE("an empty document yields the defaults") {
  for (const char* text : {"", "  \n", "{}"}) {
    const ScenarioConfig c = parse_config_text(text);
    const ScenarioConfig d;
    CHECK(c.battery.e_max == d.battery.e_max);
    CHECK(c.battery.p_max == d.battery.p_max);
    CHECK(c.arrivals.lambda == d.arrivals.lambda);
    CHECK(c.channel.mean_gain == d.channel.mean_gain);
    CHECK(c.controller == ControllerKind::kAlg2);
    CHECK_FALSE(c.v.has_value());
    CHECK(c.horizon == d.horizon);
    CHECK(c.replicas == d.replicas);
  }
}

TEST_CASE("document values are read with their units") {
  const ScenarioConfig c = parse_config_text(R"({
    "battery": {"e_max_joule": 20, "p_max_watt": 1.0, "e_c_max_joule": 0.6},
    "arrivals": {"lambda_per_slot": 0.8, "alpha_joule": 0.1},
    "channel": {"model": "miso", "antennas": 2, "mean_gain_db": 20},
    "controller": {"type": "eawf", "rate_unit": "bits"},
    "sim": {"horizon_slots": 10, "replicas": 2, "seed": 99, "e_b0_joule": 3.0}
  })");
  CHECK(c.battery.e_max == 20.0);
  CHECK(c.battery.p_max == 1.0);
  CHECK(c.arrivals.lambda == 0.8);
  CHECK(c.channel.model == ChannelModel::kMiso);
  CHECK(c.channel.antennas == 2);
  CHECK(c.channel.mean_gain == doctest::Approx(100.0));
  CHECK(c.controller == ControllerKind::kEawf);
  CHECK(c.rate_unit == RateUnit::kBits);
  CHECK(c.seed == 99);
  CHECK(c.initial_energy() == 3.0);
}

TEST_CASE("weight accepts vmax or a positive number") {
  CHECK_FALSE(parse_config_text(R"({"controller": {"v": "vmax"}})").v.has_value());
  CHECK(*parse_config_text(R"({"controller": {"v": 0.4}})").v == 0.4);
  CHECK(key_of_error(R"({"controller": {"v": -1}})") == "controller.v");
  CHECK(key_of_error(R"({"controller": {"v": "big"}})") == "controller.v");
}

TEST_CASE("overrides") {
  const std::vector<std::string> ov = {"e_max=10", "sim.replicas=3", "controller.type=greedy"};
  const ScenarioConfig c = parse_config_text("", ov);
  CHECK(c.battery.e_max == 10.0);
  CHECK(c.replicas == 3);
  CHECK(c.controller == ControllerKind::kGreedy);
  const std::vector<std::string> later = {"e_max=10", "e_max=12"};
  CHECK(parse_config_text("", later).battery.e_max == 12.0);
  CHECK(key_of_error("", {"nonsense"}) == "nonsense");
  CHECK(key_of_error("", {"zzz=1"}) == "zzz");
}

TEST_CASE("configuration errors name the key") {
  CHECK(key_of_error(R"({"battery": {"e_maxx_joule": 10}})") == "battery.e_maxx_joule");
  CHECK(key_of_error(R"({"batteries": {}})") == "batteries");
  CHECK(key_of_error(R"({"battery": {"e_max_joule": "ten"}})") == "battery.e_max_joule");
  CHECK(key_of_error(R"({"battery": {"e_c_max_joule": 0.6}})") == "battery");
  CHECK(key_of_error(R"({"channel": {"mean_gain_db": 10, "mean_gain_linear": 10}})") ==
        "channel.mean_gain_db");
  CHECK(key_of_error(R"({"sim": {"horizon_slots": 0}})") == "sim");
  CHECK(key_of_error("{not json") == "");
  CHECK(key_of_error("[1, 2]") == "");
  CHECK_THROWS_AS(parse_config(fs::path("/nonexistent/ehpc.json")), ConfigError);
}

TEST_CASE("every known key is accepted") {
  const auto keys = known_keys();
  CHECK(keys.size() >= 20);
  for (const std::string& k : keys) CHECK(k.find('.') != std::string::npos);
}

TEST_CASE("doubles survive a text round trip") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int i = 0; i < 2000; ++i) {
    const double x = u(gen) * std::pow(10.0, static_cast<int>(i % 40) - 20);
    CHECK(parse_double(format_double(x)) == x);
  }
  CHECK(format_double(0.125) == "0.125");
  CHECK(format_double(3.0) == "3");
  CHECK_THROWS_AS(format_from_string("xml"), std::invalid_argument);
}

TEST_CASE("run output in CSV") {
  TempDir tmp;
  ScenarioConfig c;
  c.horizon = 3;
  c.replicas = 1;
  c.threads = 1;
  const SimSummary s = run_scenario(c);
  const std::vector<ReplicaTrace> traces = {{0, run_replica(c, 0)}};
  const auto paths = emit_run(s, traces, Format::kCsv, tmp.path);
  REQUIRE(paths.size() == 2);

  const auto summary = read_lines(tmp.path / "summary.csv");
  REQUIRE(summary.size() == 4);
  CHECK(summary[0] == "t,mean_avg_rate,stderr");
  for (std::size_t t = 0; t < 3; ++t) {
    const auto cells = split(summary[t + 1]);
    REQUIRE(cells.size() == 3);
    CHECK(cells[0] == std::to_string(t));
    CHECK(std::abs(parse_double(cells[1]) - s.avg_rate_series[t]) <= 1e-12);
  }

  const auto trace = read_lines(tmp.path / "trace.csv");
  REQUIRE(trace.size() == 4);
  CHECK(trace[0] == "replica,t,e_a,gamma,p,rate,e_s,e_b_end,x");
  const auto row = split(trace[3]);
  REQUIRE(row.size() == 9);
  CHECK(parse_double(row[7]) == traces[0].records[2].e_b_end);
  CHECK(parse_double(row[8]) == traces[0].records[2].x);
}

TEST_CASE("run output in JSON") {
  TempDir tmp;
  ScenarioConfig c;
  c.horizon = 5;
  c.replicas = 2;
  c.threads = 1;
  const SimSummary s = run_scenario(c);
  emit_run(s, {}, Format::kJson, tmp.path);
  CHECK_FALSE(fs::exists(tmp.path / "trace.csv"));
  std::ifstream in(tmp.path / "summary.json");
  const auto doc = nlohmann::json::parse(in);
  for (const char* k : {"controller", "horizon", "replicas", "final_avg_rate", "final_stderr",
                        "mean_power_watt", "outage_slots", "max_abs_conservation_residual_joule",
                        "series"})
    CHECK(doc.contains(k));
  CHECK(doc["controller"] == "alg2");
  CHECK(doc["series"].size() == 5);
  CHECK(doc["final_avg_rate"].get<double>() == s.final_avg_rate);
}

TEST_CASE("sweep output has one row per point") {
  TempDir tmp;
  ScenarioConfig c;
  c.horizon = 50;
  c.replicas = 2;
  c.threads = 1;
  const double vmax = Scenario::prepare(c).params.v_max;
  std::vector<SweepPoint> pts;
  for (int k = 1; k <= 8; ++k) pts.push_back({vmax * k / 8.0, 0.0});
  const std::vector<ControllerKind> ks = {ControllerKind::kAlg2, ControllerKind::kGreedy};
  const auto rows = sweep(c, SweepAxis::kV, pts, ks);
  emit_sweep(SweepAxis::kV, rows, Format::kCsv, tmp.path);
  const auto lines = read_lines(tmp.path / "sweep.csv");
  REQUIRE(lines.size() == 9);
  CHECK(lines[0] == "v,alg2_rate,alg2_stderr,greedy_rate,greedy_stderr");
  CHECK(parse_double(split(lines[8])[0]) == vmax);

  emit_sweep(SweepAxis::kSnrN, rows, Format::kJson, tmp.path);
  std::ifstream in(tmp.path / "sweep.json");
  const auto doc = nlohmann::json::parse(in);
  CHECK(doc["axis"] == "snr_n");
  CHECK(doc["points"].size() == 8);
}

TEST_CASE("bounds and oracle output") {
  TempDir tmp;
  const ScenarioConfig c;
  const Scenario sc = Scenario::prepare(c);
  emit_bounds(bound_report(c.battery, sc.params, c.channel), tmp.path);
  std::ifstream in(tmp.path / "bounds.json");
  const auto doc = nlohmann::json::parse(in);
  CHECK(doc["b_const"].get<double>() == doctest::Approx(0.125));
  CHECK(doc["gamma_max_db"].get<double>() == doctest::Approx(16.63).epsilon(1e-3));

  GapCheckRow row;
  row.id = "x";
  row.pass = true;
  const std::vector<GapCheckRow> rows = {row};
  emit_oracle(rows, Format::kCsv, tmp.path);
  const auto lines = read_lines(tmp.path / "oracle.csv");
  REQUIRE(lines.size() == 2);
  CHECK(split(lines[0]).back() == "pass");
  CHECK(split(lines[1]).back() == "true");
}
