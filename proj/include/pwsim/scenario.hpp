// scenario.hpp — run orchestration: build a configured scenario, evolve it,
// propagate the ensemble, run the configured analyses and emit outputs.

#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "pwsim/collapse.hpp"
#include "pwsim/config.hpp"
#include "pwsim/field_reconstruct.hpp"
#include "pwsim/guidance.hpp"

namespace pwsim {

enum class RunStatus : int {
    ok = 0,
    assertion_failed = 1,
    config_error = 2,
    numeric_failure = 3,
};

struct RunOverrides {
    std::optional<std::filesystem::path> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
};

// Everything a scenario run materializes before time evolution.
struct ScenarioBuild {
    ConfigurationGrid grid;
    HamiltonianSpec hamiltonian;
    LabeledWavefunction initial_state;
    std::optional<ModeBasis> modes;
    std::vector<LabeledWavefunction> branches;  // label projections when collapse is on
    std::vector<std::string> warnings;
};

ScenarioBuild build_scenario(const ScenarioConfig& config);

struct RunResult {
    RunStatus status = RunStatus::ok;
    std::string manifest_json;            // full manifest document
    std::filesystem::path manifest_path;  // where it was written
};

RunResult run_scenario(const ScenarioConfig& config, const RunOverrides& overrides = {});

// Continue a checkpointed run to completion.
RunResult resume_scenario(const std::filesystem::path& checkpoint_path,
                          const RunOverrides& overrides = {});

// Human-readable summary of a manifest file.
std::string summarize_manifest(const std::filesystem::path& manifest_path);

}  // namespace pwsim
