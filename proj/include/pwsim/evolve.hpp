// evolve.hpp — norm-preserving time evolution and observable expectations.
//
// Periodic grids use Strang splitting between the momentum-diagonal part
// (kinetic + label-diagonal drift, applied as exact spectral phases) and the
// position-diagonal part (potential + label coupling, applied as exact
// per-node matrix exponentials). Reflecting grids use per-axis Crank-Nicolson
// for the kinetic factor instead. Both are unitary and second order in dt.

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "pwsim/hamiltonian.hpp"
#include "pwsim/spectral.hpp"

namespace pwsim {

class SplitStepEvolver {
public:
    SplitStepEvolver(const HamiltonianSpec& hamiltonian, double dt);
    ~SplitStepEvolver();
    SplitStepEvolver(const SplitStepEvolver&) = delete;
    SplitStepEvolver& operator=(const SplitStepEvolver&) = delete;

    const HamiltonianSpec& hamiltonian() const { return hamiltonian_; }
    double dt() const { return dt_; }

    void load(const LabeledWavefunction& psi);
    // Advances the loaded state; throws on non-finite amplitudes, naming the
    // step index since load().
    void step(std::size_t count = 1);
    LabeledWavefunction snapshot() const;
    double time() const { return time_; }
    std::size_t steps_taken() const { return steps_taken_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

private:
    struct Impl;
    HamiltonianSpec hamiltonian_;
    double dt_ = 0.0;
    double time_ = 0.0;
    std::size_t steps_taken_ = 0;
    std::vector<std::string> warnings_;
    std::vector<Complex> state_;
    std::unique_ptr<Impl> impl_;
};

LabeledWavefunction evolve(const LabeledWavefunction& psi, const HamiltonianSpec& hamiltonian,
                           double dt, std::size_t steps);

struct Observable {
    enum class Kind { identity, position, momentum, scalar_field, label_matrix };
    Kind kind = Kind::identity;
    std::size_t axis = 0;
    std::vector<double> field;          // scalar_field: one value per node
    std::vector<Complex> label_matrix;  // label_matrix: L x L Hermitian

    static Observable identity() { return {}; }
    static Observable position(std::size_t axis) {
        return Observable{Kind::position, axis, {}, {}};
    }
    static Observable momentum(std::size_t axis) {
        return Observable{Kind::momentum, axis, {}, {}};
    }
    static Observable scalar_field(std::vector<double> values) {
        return Observable{Kind::scalar_field, 0, std::move(values), {}};
    }
    static Observable label(std::vector<Complex> matrix) {
        return Observable{Kind::label_matrix, 0, {}, std::move(matrix)};
    }
};

// Real expectation value; imaginary residue beyond 1e-12 of the scale throws
// (non-Hermitian input).
double expectation(const LabeledWavefunction& psi, const Observable& obs);

// H|psi>; shares the grid and label count of psi.
LabeledWavefunction apply_hamiltonian(const LabeledWavefunction& psi, const HamiltonianSpec& h);

// <psi|H|psi> (real part; Hermiticity checked to 1e-10 of scale).
double energy_expectation(const LabeledWavefunction& psi, const HamiltonianSpec& h);

}  // namespace pwsim
