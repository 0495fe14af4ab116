#include <doctest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <pwsim/scenario.hpp>
#include <sstream>

using namespace pwsim;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path repo_root() { return fs::path(__FILE__).parent_path().parent_path(); }

fs::path fresh_dir(const char* name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    REQUIRE_MESSAGE(bool(is), p.string());
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

json manifest_without_timing(const fs::path& p) {
    json m = json::parse(slurp(p));
    m.erase("started_at");
    m.erase("finished_at");
    return m;
}

const char* kSmallFree = R"json({
  "name": "small_free",
  "scenario": "free_particle",
  "grid": {"axes": [{"min": -14.0, "max": 14.0, "points": 256}]},
  "run": {"dt": 0.004, "steps": 250, "snapshot_stride": 50},
  "initial_state": {"centers": [0.0], "widths": [0.5]},
  "ensemble": {"n": 800, "seed": 604, "method": "rejection"},
  "analyses": {"equivariance": {"enabled": true, "expect": "pass"}},
  "output": {"directory": "unused", "trajectories": true}
})json";

const char* kSmallMeasurement = R"json({
  "name": "small_measurement",
  "scenario": "measurement",
  "grid": {"axes": [{"min": -6.0, "max": 18.0, "points": 512}]},
  "run": {"dt": 0.01, "steps": 300, "snapshot_stride": 20, "checkpoint_step": 150},
  "hamiltonian": {"levels": 2, "coupling": 2.0, "pointer_mass": 20.0},
  "initial_state": {
    "centers": [0.0], "widths": [0.5],
    "label_amplitudes": [[0.5477225575051661, 0.0], [0.8366600265340756, 0.0]]
  },
  "ensemble": {"n": 300, "seed": 8051, "method": "rejection"},
  "collapse": {"enabled": true, "threshold": 1e-6},
  "analyses": {"born": {"enabled": true, "expected_fractions": [0.3, 0.7]}},
  "output": {"directory": "unused", "trajectories": true}
})json";

// Final stored coordinate per trajectory id from a trajectories.csv.
std::map<int, double> final_coords(const fs::path& csv) {
    std::ifstream is(csv);
    REQUIRE_MESSAGE(bool(is), csv.string());
    std::string line;
    std::getline(is, line);  // header
    std::map<int, double> out;
    while (std::getline(is, line)) {
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        out[std::stoi(line.substr(0, c1))] = std::stod(line.substr(c2 + 1));
    }
    return out;
}

}  // namespace

TEST_CASE("build_scenario: one build per scenario kind") {
    for (const char* text : {kSmallFree, kSmallMeasurement}) {
        const ParseResult r = parse_config_text(text);
        REQUIRE(r.ok());
        const ScenarioBuild b = build_scenario(*r.config);
        CHECK(b.initial_state.squared_norm() == doctest::Approx(1.0).epsilon(1e-10));
    }
    const ParseResult shipped = parse_config(repo_root() / "scenarios" / "coherent_mode.json");
    REQUIRE(shipped.ok());
    const ScenarioBuild b = build_scenario(*shipped.config);
    REQUIRE(b.modes.has_value());
    CHECK(b.modes->size() == 1);
    // Coherent width = ground width of the omega = 1 oscillator.
    CHECK(b.hamiltonian.potential[0] > 0.0);
}

TEST_CASE("run_scenario: statuses, manifest content and reproducibility") {
    const ParseResult r = parse_config_text(kSmallFree);
    REQUIRE(r.ok());

    RunOverrides o1;
    o1.out_dir = fresh_dir("pwsim_it_free_a");
    const RunResult res1 = run_scenario(*r.config, o1);
    CHECK(res1.status == RunStatus::ok);

    const json m = json::parse(res1.manifest_json);
    CHECK(m.at("status") == "ok");
    CHECK(m.at("assertions").at("unitarity").get<bool>());
    CHECK(m.at("assertions").at("energy_conservation").get<bool>());
    CHECK(m.at("assertions").at("equivariance").get<bool>());
    CHECK(m.at("metrics").at("norm_drift_per_1000_steps").get<double>() < 1e-10);
    CHECK(m.at("metrics").at("energy_drift_relative").get<double>() < 1e-6);
    CHECK(m.at("metrics").at("ks_pass").get<bool>());

    // Byte-identical rerun (timestamps aside).
    RunOverrides o2;
    o2.out_dir = fresh_dir("pwsim_it_free_b");
    const RunResult res2 = run_scenario(*r.config, o2);
    CHECK(slurp(*o1.out_dir / "trajectories.csv") == slurp(*o2.out_dir / "trajectories.csv"));
    CHECK(slurp(*o1.out_dir / "fit_report.json") == slurp(*o2.out_dir / "fit_report.json"));
    CHECK(manifest_without_timing(*o1.out_dir / "manifest.json") ==
          manifest_without_timing(*o2.out_dir / "manifest.json"));

    // A different seed produces different trajectories.
    RunOverrides o3;
    o3.out_dir = fresh_dir("pwsim_it_free_c");
    o3.seed = 605;
    run_scenario(*r.config, o3);
    CHECK(slurp(*o1.out_dir / "trajectories.csv") != slurp(*o3.out_dir / "trajectories.csv"));

    // The negative-control expectation flips the assertion.
    ScenarioConfig expecting_fail = *r.config;
    expecting_fail.equivariance.expect = "fail";
    RunOverrides o4;
    o4.out_dir = fresh_dir("pwsim_it_free_d");
    const RunResult res4 = run_scenario(expecting_fail, o4);
    CHECK(res4.status == RunStatus::assertion_failed);
}

TEST_CASE("run_scenario: measurement with checkpoint, resume matches the full run") {
    const ParseResult r = parse_config_text(kSmallMeasurement);
    REQUIRE(r.ok());

    RunOverrides full;
    full.out_dir = fresh_dir("pwsim_it_meas_full");
    const RunResult res = run_scenario(*r.config, full);
    CHECK(res.status == RunStatus::ok);
    const json m = json::parse(res.manifest_json);
    CHECK(m.at("assertions").at("born_fractions").get<bool>());
    CHECK(m.at("metrics").contains("collapse_time"));
    const double fraction0 = m.at("metrics").at("born_fractions")[0].get<double>();
    CHECK(std::abs(fraction0 - 0.3) < 3.0 * std::sqrt(0.21 / 300.0));

    // Resume from the emitted checkpoint and compare endpoints.
    RunOverrides resumed;
    resumed.out_dir = fresh_dir("pwsim_it_meas_resume");
    const RunResult rr = resume_scenario(*full.out_dir / "checkpoint.pwsim", resumed);
    CHECK(rr.status == RunStatus::ok);
    const auto full_ends = final_coords(*full.out_dir / "trajectories.csv");
    const auto resi_ends = final_coords(*resumed.out_dir / "trajectories.csv");
    REQUIRE(full_ends.size() == resi_ends.size());
    for (const auto& [id, x] : full_ends)
        CHECK(std::abs(x - resi_ends.at(id)) < 1e-12);
}

TEST_CASE("shipped scenario corpus parses and covers the advertised features") {
    const fs::path dir = repo_root() / "scenarios";
    const json manifest = json::parse(slurp(dir / "manifest.json"));

    std::set<std::string> kinds;
    std::set<std::string> features;
    std::set<std::string> listed;
    for (const auto& f : manifest.at("files")) listed.insert(f.get<std::string>());

    std::set<std::string> present;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name == "manifest.json") continue;
        present.insert(name);
        const ParseResult r = parse_config(entry.path());
        const std::string why = name + ": " + (r.errors.empty() ? std::string() : r.errors.front());
        REQUIRE_MESSAGE(r.ok(), why);
        const ScenarioConfig& c = *r.config;
        kinds.insert(to_string(c.kind));
        if (c.equivariance.enabled) features.insert("equivariance");
        if (c.born.enabled) features.insert("born");
        if (c.collapse.enabled) features.insert("collapse");
        if (c.ehrenfest.enabled) features.insert("ehrenfest");
        if (c.field_samples.enabled) features.insert("field_samples");
        if (c.run.checkpoint_step) features.insert("checkpoint");
    }
    CHECK(present == listed);
    for (const auto& k : manifest.at("required_scenarios"))
        CHECK_MESSAGE(kinds.count(k.get<std::string>()) == 1, k.get<std::string>());
    for (const auto& f : manifest.at("required_features"))
        CHECK_MESSAGE(features.count(f.get<std::string>()) == 1, f.get<std::string>());
}

TEST_CASE("summarize_manifest renders pass/fail lines") {
    const ParseResult r = parse_config_text(kSmallFree);
    REQUIRE(r.ok());
    RunOverrides o;
    o.out_dir = fresh_dir("pwsim_it_report");
    const RunResult res = run_scenario(*r.config, o);
    const std::string report = summarize_manifest(res.manifest_path);
    CHECK(report.find("small_free") != std::string::npos);
    CHECK(report.find("status:   ok") != std::string::npos);
    CHECK(report.find("equivariance: pass") != std::string::npos);
}
