// guidance.hpp — label-traced probability currents, beable velocity fields
// and trajectory integration.
//
// The current traces over the label index:
//   j_a = (1/m_a) [ sum_f Im(conj(Psi_f) d_a Psi_f) - e A_a sum_f |Psi_f|^2 ]
//       + sum_f lambda_{f,a} |Psi_f|^2
// and the guidance velocity is v = j / rho with frozen (v = 0, masked) nodes
// where rho falls below 1e-12 of its maximum.

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "pwsim/evolve.hpp"
#include "pwsim/hamiltonian.hpp"

namespace pwsim {

struct CurrentField {
    ConfigurationGrid grid;
    std::vector<std::vector<double>> components;  // [axis][node]
    double time = 0.0;
};

struct VelocityField {
    ConfigurationGrid grid;
    std::vector<std::vector<double>> components;  // [axis][node]; masked nodes hold 0
    std::vector<std::uint8_t> node_mask;          // 1 where rho < eps_node
    double time = 0.0;
    double max_speed = 0.0;
};

// Relative density floor for the node mask.
inline constexpr double kNodeEpsilonRelative = 1e-12;

CurrentField current(const LabeledWavefunction& psi, const HamiltonianSpec& hamiltonian);
CurrentField current(const LabeledWavefunction& psi, const HamiltonianSpec& hamiltonian,
                     SpectralWorkspace& workspace);

VelocityField velocity_field(const DensityField& rho, const CurrentField& j);

// Two velocity snapshots bracketing a time interval; linear in time between
// them, multilinear in space.
struct VelocitySpan {
    const VelocityField* before = nullptr;
    const VelocityField* after = nullptr;
};

class TrajectoryEscape : public Error {
public:
    explicit TrajectoryEscape(const std::string& what) : Error(what) {}
};

// One RK4 step from t to t+dt, internally halved (up to max_halvings times)
// while |v| dt exceeds half the minimum grid spacing. Throws
// TrajectoryEscape when the point leaves a reflecting grid.
BeableConfiguration step_trajectory(const BeableConfiguration& q, const VelocitySpan& v, double t,
                                    double dt, int max_halvings = 8);

struct Trajectory {
    std::vector<double> times;
    std::vector<BeableConfiguration> points;
};

struct PropagateOptions {
    std::size_t store_stride = 1;  // trajectory samples every this many steps
    int threads = 1;
    double velocity_scale = 1.0;  // diagnostic hook for negative controls
    int max_halvings = 8;
    // Invoked after each evolution step (and once at step 0) with the current
    // state; serves snapshot consumers without a second evolution pass.
    std::function<void(std::size_t step, const LabeledWavefunction&)> on_step;
};

struct EnsembleRun {
    std::vector<Trajectory> trajectories;
    std::vector<std::size_t> aborted;  // indices of escaped trajectories
    LabeledWavefunction final_state;
    double max_speed = 0.0;
    std::vector<std::string> warnings;
};

// Evolves psi0 once and integrates every start point against the shared
// per-step velocity fields (ring of two). Deterministic for a fixed seed and
// any thread count.
EnsembleRun propagate_ensemble(std::span<const BeableConfiguration> starts,
                               const LabeledWavefunction& psi0, const HamiltonianSpec& hamiltonian,
                               double dt, std::size_t steps, const PropagateOptions& options = {});

// Max-norm of the discrete continuity residual d_t rho + div j, with midpoint
// time derivative between the bracketing densities and central-difference
// divergence of the current.
double continuity_residual(const DensityField& rho_minus, const CurrentField& j,
                           const DensityField& rho_plus, double dt);

}  // namespace pwsim
