// config.hpp — JSON scenario configuration with strict validation.
//
// Parsing is not fail-fast: every violation (unknown key, bad range, missing
// field) is collected so a config can be fixed in one pass.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pwsim/grid.hpp"
#include "pwsim/wavefunction.hpp"

namespace pwsim {

enum class ScenarioKind {
    free_particle,
    pauli_spin,
    free_field_modes,
    coupled_qed_toy,
    measurement,
};

std::string to_string(ScenarioKind kind);

struct GridConfig {
    std::vector<AxisSpec> axes;
    Boundary boundary = Boundary::periodic;
};

struct RunConfig {
    double dt = 0.01;
    std::size_t steps = 100;
    std::size_t snapshot_stride = 1;
    std::optional<std::size_t> checkpoint_step;
};

struct EnsembleConfig {
    std::size_t n = 0;  // 0 = no ensemble propagation
    std::uint64_t seed = 1;
    std::string method = "auto";  // auto | rejection | metropolis
};

struct InitialStateConfig {
    std::string kind = "gaussian";  // gaussian | coherent
    std::vector<double> centers;
    std::vector<double> widths;   // required for gaussian; derived for coherent
    std::vector<double> momenta;  // optional
    std::vector<Complex> label_amplitudes{Complex{1.0, 0.0}};
};

struct FreeParticleParams {
    double mass = 1.0;
};

struct PauliParams {
    double mass = 1.0;
    double mu = 1.0;
    double charge = 1.0;
    std::array<double, 3> b_field{0.0, 0.0, 0.0};
    std::array<double, 3> a_field{0.0, 0.0, 0.0};
};

struct ModeParams {
    std::vector<std::array<double, 3>> k_list;
    std::vector<std::size_t> retain;  // real-mode subset; empty = all
};

struct CoupledParams {
    double coupling_strength = 0.0;
    std::size_t coupled_mode = 0;
    std::vector<double> level_energies;
};

struct MeasurementParams {
    std::size_t levels = 2;
    double coupling = 1.0;
    double pointer_mass = 1.0;
};

struct CollapseConfig {
    bool enabled = false;
    double threshold = 1e-6;
};

struct EquivarianceAnalysis {
    bool enabled = false;
    double ks_critical = 1.63;     // 1% critical coefficient
    double velocity_scale = 1.0;   // negative-control hook
    std::string expect = "pass";   // pass | fail
};

struct BornAnalysis {
    bool enabled = false;
    std::vector<double> expected_fractions;
    double tolerance_sigmas = 3.0;
};

struct EhrenfestAnalysis {
    bool enabled = false;
    double time = 0.0;
};

struct FieldSampleAnalysis {
    bool enabled = false;
    std::vector<std::array<double, 3>> points;
    std::size_t trajectory_index = 0;
};

struct OutputConfig {
    std::string directory = "out";
    bool trajectories = false;
    bool fields = false;
    std::size_t trajectory_stride = 1;
};

struct ScenarioConfig {
    std::string name;
    ScenarioKind kind = ScenarioKind::free_particle;
    GridConfig grid;
    RunConfig run;
    EnsembleConfig ensemble;
    InitialStateConfig initial_state;
    FreeParticleParams free_particle;
    PauliParams pauli;
    ModeParams modes;
    CoupledParams coupled;
    MeasurementParams measurement;
    CollapseConfig collapse;
    EquivarianceAnalysis equivariance;
    BornAnalysis born;
    EhrenfestAnalysis ehrenfest;
    FieldSampleAnalysis field_samples;
    OutputConfig output;
};

struct ParseResult {
    std::optional<ScenarioConfig> config;
    std::vector<std::string> errors;
    bool ok() const { return config.has_value() && errors.empty(); }
};

ParseResult parse_config_text(const std::string& json_text);
ParseResult parse_config(const std::filesystem::path& path);

// Deterministic re-serialization of a parsed config (sorted keys); the basis
// for config hashing and checkpoint embedding.
std::string canonical_config_text(const ScenarioConfig& config);

// FNV-1a 64-bit over the canonical text, as hex.
std::string config_hash(const ScenarioConfig& config);

}  // namespace pwsim
