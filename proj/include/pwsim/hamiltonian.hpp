// hamiltonian.hpp — Hamiltonian specifications and the model builders.
//
// A HamiltonianSpec is a sum of:
//   kinetic      sum_a (1/(2 m_a)) (p_a - e A_a)^2        (A optional)
//   potential    V(q), real field over the grid
//   coupling     sum_m c_m(q) G_m, scalar fields times constant L x L
//                Hermitian matrices acting on the label index
//   drift        sum_{f,a} lambda_{f,a} p_a, label-diagonal momentum terms
//                (pointer couplings in measurement models)

#pragma once

#include <array>
#include <optional>
#include <vector>

#include "pwsim/mode_basis.hpp"
#include "pwsim/wavefunction.hpp"

namespace pwsim {

// c(q) * G with G Hermitian. An empty field means the term is spatially
// constant; `axis >= 0` means c(q) = constant * q_axis (coordinate coupling,
// kept symbolic so grids stay cheap).
struct CouplingTerm {
    std::vector<double> field;
    double constant = 1.0;
    int axis = -1;
    std::vector<Complex> matrix;  // L x L row-major

    double value_at(const ConfigurationGrid& grid, std::size_t node) const;
};

struct VectorPotential {
    std::vector<double> components;  // uniform A_a per grid axis
    double charge = 1.0;
};

struct HamiltonianSpec {
    ConfigurationGrid grid;
    std::size_t labels = 1;
    std::vector<double> kinetic_metric;  // 1/m_a per axis
    std::vector<double> potential;       // per node; empty = 0
    std::optional<VectorPotential> vector_potential;
    std::vector<CouplingTerm> label_coupling;
    std::vector<std::vector<double>> momentum_coupling;  // [label][axis]; empty = none

    double mass(std::size_t axis) const { return 1.0 / kinetic_metric[axis]; }

    // Hermiticity of coupling matrices (1e-12), finite fields, sizes.
    void validate() const;

    // Assembles V(q) I + sum_m c_m(q) G_m at a node (row-major L x L).
    void local_matrix(std::size_t node, std::vector<Complex>& out) const;
};

struct Vector3Field {
    std::array<std::vector<double>, 3> comp;  // each: empty = 0, size 1 = uniform, or grid-sized

    static Vector3Field uniform(double x, double y, double z) {
        return Vector3Field{{std::vector<double>{x}, std::vector<double>{y},
                             std::vector<double>{z}}};
    }
    static Vector3Field zero() { return Vector3Field{}; }
    bool is_zero(std::size_t c) const {
        for (double v : comp[c])
            if (v != 0.0) return false;
        return true;
    }
};

// Two-component spin dynamics: -(1/2m)(grad - i e A)^2 + mu sigma.B + V in
// the sigma_3-diagonal basis. Grid dimension must be 1, 2 or 3.
HamiltonianSpec build_pauli_hamiltonian(const ConfigurationGrid& grid, const Vector3Field& a_field,
                                        const std::vector<double>& potential,
                                        const Vector3Field& b_field, double mu, double charge,
                                        double mass);

// Independent unit-mass oscillators, one per real mode: sum_j (p_j^2 +
// omega_j^2 q_j^2)/2 with omega_j = |k_j|. One grid axis per mode; L = 1.
HamiltonianSpec build_mode_field_hamiltonian(const ConfigurationGrid& grid,
                                             const ModeBasis& modes);

struct ModeCoupling {
    std::size_t mode_index = 0;
    std::vector<Complex> matrix;  // L x L Hermitian
};

// Mode oscillators + diag(level_energies) + sum_j q_j g_j on the label index.
HamiltonianSpec build_coupled_hamiltonian(const ConfigurationGrid& grid, const ModeBasis& modes,
                                          std::size_t labels,
                                          const std::vector<ModeCoupling>& couplings,
                                          const std::vector<double>& level_energies);

// Pauli matrices, row-major 2x2.
std::vector<Complex> pauli_matrix(int which);  // 1, 2 or 3

bool is_hermitian(std::span<const Complex> matrix, std::size_t n, double tol = 1e-12);

}  // namespace pwsim
