// collapse.hpp — branch decompositions, overlap functionals and effective
// collapse detection.
//
// Two branches are effectively non-overlapping when their amplitude supports
// are disjoint over the configuration grid for every label pair; orthogonality
// in the label index alone does NOT count (the traced density still mixes the
// branches there). branch_overlap measures the former, density_overlap the
// equivalent traced-density condition.

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pwsim/guidance.hpp"
#include "pwsim/wavefunction.hpp"

namespace pwsim {

struct BranchDecomposition {
    std::vector<LabeledWavefunction> branches;
    std::vector<double> weights;  // ||branch||^2
    double residual = 0.0;        // ||psi - sum(branches)||
    double cross_terms = 0.0;     // ||psi||^2 - sum weights

    std::vector<DensityField> branch_densities() const;

    // Validates residual < 1e-10.
    static BranchDecomposition build(const LabeledWavefunction& psi,
                                     std::vector<LabeledWavefunction> branches);
};

// Normalized support overlap: sum_grid (sum_f |a_f|)(sum_f' |b_f'|) cell /
// (||a|| ||b||). Zero iff amplitude supports are disjoint; >= 1 for identical
// normalized states; insensitive to phases.
double branch_overlap(const LabeledWavefunction& a, const LabeledWavefunction& b);

// Normalized traced-density overlap: <rho_a, rho_b> / (||rho_a||_2 ||rho_b||_2).
double density_overlap(const LabeledWavefunction& a, const LabeledWavefunction& b);

// |<branch, psi>|^2 / ||branch||^2; equals the branch weight for exactly
// non-overlapping decompositions of a normalized psi.
double collapse_probability(const LabeledWavefunction& branch, const LabeledWavefunction& psi);

struct Classification {
    std::size_t index = 0;
    bool ambiguous = false;       // top two branch densities within a factor 10
    bool unclassifiable = false;  // all branch densities below the node floor
};

Classification classify_trajectory(const BeableConfiguration& q, const BranchDecomposition& d);
Classification classify_point(const BeableConfiguration& q,
                              std::span<const DensityField> branch_densities);

struct BranchSnapshot {
    double time = 0.0;
    std::vector<LabeledWavefunction> branches;
};

struct CollapseReport {
    std::size_t trajectory_id = 0;
    std::optional<std::size_t> branch_index;
    std::optional<double> collapse_time;
    std::vector<double> overlap_times;
    std::vector<double> overlap_history;            // max pairwise density overlap
    std::vector<double> amplitude_overlap_history;  // max pairwise branch overlap
    double velocity_agreement_error = 0.0;
    bool ambiguous = false;
    bool unclassifiable = false;
};

// Scans the snapshot history for the first time the pairwise density overlap
// drops below `threshold` and stays there, classifies the trajectory at that
// time, and measures the post-collapse velocity agreement
// max_t |v_total(q(t)) - v_branch(q(t))| / (|v_branch(q(t))| + 1e-12).
CollapseReport detect_effective_collapse(const Trajectory& trajectory,
                                         std::span<const BranchSnapshot> history, double threshold,
                                         const HamiltonianSpec& hamiltonian,
                                         std::size_t trajectory_id = 0);

struct MeasurementScenario {
    HamiltonianSpec hamiltonian;
    LabeledWavefunction initial_state;               // normalized
    std::vector<LabeledWavefunction> branch_template;  // per-level label projections
    std::vector<std::string> warnings;
};

// Von Neumann pointer model on a 1-D grid: level i (1-based rate factor)
// drags the pointer at speed coupling * i; the initial state is
// (sum_i c_i |i>) x Gaussian pointer packet. Warns when coupling * duration
// separates adjacent packets by less than 5 pointer widths.
MeasurementScenario build_measurement_scenario(std::size_t levels,
                                               const ConfigurationGrid& pointer_grid,
                                               double coupling, double duration,
                                               std::span<const Complex> level_amplitudes,
                                               double pointer_width, double pointer_center = 0.0,
                                               double pointer_mass = 1.0);

}  // namespace pwsim
