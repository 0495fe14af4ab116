// field_reconstruct.hpp — physical-space fields from mode beables.
//
// With real standing-wave modes, A(x) = sum_j N_j eps_j q_j trig_j(k_j.x)
// (trig = cos or sin by parity). B = curl A swaps the parity trig with a sign
// and picks up k x eps; E = -dA/dt uses the beable velocities q_dot.

#pragma once

#include <optional>
#include <span>

#include "pwsim/guidance.hpp"
#include "pwsim/mode_basis.hpp"

namespace pwsim {

struct FieldSample {
    Eigen::Vector3d x = Eigen::Vector3d::Zero();
    Eigen::Vector3d A = Eigen::Vector3d::Zero();
    Eigen::Vector3d B = Eigen::Vector3d::Zero();
    std::optional<Eigen::Vector3d> E;
    bool boundary_degraded = false;  // one-sided q_dot estimate at a trajectory end
};

std::vector<FieldSample> reconstruct_A(std::span<const double> q, const ModeBasis& modes,
                                       std::span<const Eigen::Vector3d> points);

std::vector<FieldSample> reconstruct_B(std::span<const double> q, const ModeBasis& modes,
                                       std::span<const Eigen::Vector3d> points);

// E(x, t) = -sum_j N_j eps_j q_dot_j(t) trig_j(k_j.x); q_dot by centered
// difference on the trajectory, one-sided (and flagged) at its ends.
std::vector<FieldSample> reconstruct_E(const Trajectory& trajectory, const ModeBasis& modes,
                                       std::span<const Eigen::Vector3d> points, double t);

// Combined A, B and (when a trajectory is given) E samples.
std::vector<FieldSample> reconstruct_fields(std::span<const double> q, const ModeBasis& modes,
                                            std::span<const Eigen::Vector3d> points,
                                            const Trajectory* trajectory = nullptr,
                                            double t = 0.0);

// Finite-difference beable velocities at time t from a trajectory.
std::vector<double> mode_velocities(const Trajectory& trajectory, double t,
                                    bool* boundary_degraded = nullptr);

// Max-norm over the sample points of d<B>/dt + curl <E>, with <B> from the
// mode-coordinate means of the bracketing states (centered difference) and
// <E> from the momentum means of the middle state (E = -Pi). The history must
// hold >= 3 equally spaced snapshots around t.
double ehrenfest_residual(std::span<const LabeledWavefunction> history,
                          const HamiltonianSpec& hamiltonian, const ModeBasis& modes,
                          std::span<const Eigen::Vector3d> points, double t);

}  // namespace pwsim
