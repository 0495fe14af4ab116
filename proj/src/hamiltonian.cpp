#include "pwsim/hamiltonian.hpp"

#include <cmath>
#include <sstream>

namespace pwsim {

namespace {
constexpr double kHermTol = 1e-12;

void check_field_size(const std::vector<double>& field, std::size_t n, const char* name) {
    if (!field.empty() && field.size() != n) {
        std::ostringstream os;
        os << "hamiltonian: " << name << " has " << field.size() << " values, grid has " << n;
        throw Error(os.str());
    }
    for (double v : field) {
        if (!std::isfinite(v)) {
            std::ostringstream os;
            os << "hamiltonian: " << name << " contains a non-finite value";
            throw Error(os.str());
        }
    }
}

double coordinate_of_node(const ConfigurationGrid& grid, std::size_t node, std::size_t axis) {
    const std::size_t i = (node / grid.stride(axis)) % grid.axis(axis).points;
    return grid.coordinate(axis, i);
}
}  // namespace

double CouplingTerm::value_at(const ConfigurationGrid& grid, std::size_t node) const {
    double c = constant;
    if (axis >= 0) c *= coordinate_of_node(grid, node, static_cast<std::size_t>(axis));
    if (!field.empty()) c *= field.size() == 1 ? field[0] : field[node];
    return c;
}

bool is_hermitian(std::span<const Complex> matrix, std::size_t n, double tol) {
    if (matrix.size() != n * n) return false;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (std::abs(matrix[i * n + j] - std::conj(matrix[j * n + i])) > tol) return false;
    return true;
}

void HamiltonianSpec::validate() const {
    if (labels == 0) throw Error("hamiltonian: labels must be positive");
    if (kinetic_metric.size() != grid.dims())
        throw Error("hamiltonian: kinetic_metric needs one entry per grid axis");
    for (double c : kinetic_metric)
        if (!(c > 0.0) || !std::isfinite(c))
            throw Error("hamiltonian: kinetic_metric entries must be positive and finite");
    check_field_size(potential, grid.size(), "potential");
    if (vector_potential) {
        if (vector_potential->components.size() != grid.dims())
            throw Error("hamiltonian: vector potential needs one component per grid axis");
        for (double v : vector_potential->components)
            if (!std::isfinite(v)) throw Error("hamiltonian: vector potential non-finite");
    }
    for (const CouplingTerm& term : label_coupling) {
        if (!is_hermitian(term.matrix, labels, kHermTol))
            throw Error("hamiltonian: label coupling matrix is not Hermitian");
        if (term.axis >= static_cast<int>(grid.dims()))
            throw Error("hamiltonian: coupling axis out of range");
        if (term.field.size() > 1) check_field_size(term.field, grid.size(), "coupling field");
    }
    if (!momentum_coupling.empty()) {
        if (momentum_coupling.size() != labels)
            throw Error("hamiltonian: momentum_coupling needs one row per label");
        for (const auto& row : momentum_coupling)
            if (row.size() != grid.dims())
                throw Error("hamiltonian: momentum_coupling rows need one entry per axis");
    }
}

void HamiltonianSpec::local_matrix(std::size_t node, std::vector<Complex>& out) const {
    out.assign(labels * labels, Complex{0.0, 0.0});
    const double v = potential.empty() ? 0.0 : potential[node];
    for (std::size_t f = 0; f < labels; ++f) out[f * labels + f] = v;
    for (const CouplingTerm& term : label_coupling) {
        const double c = term.value_at(grid, node);
        if (c == 0.0) continue;
        for (std::size_t i = 0; i < labels * labels; ++i) out[i] += c * term.matrix[i];
    }
}

std::vector<Complex> pauli_matrix(int which) {
    switch (which) {
        case 1: return {Complex{0, 0}, Complex{1, 0}, Complex{1, 0}, Complex{0, 0}};
        case 2: return {Complex{0, 0}, Complex{0, -1}, Complex{0, 1}, Complex{0, 0}};
        case 3: return {Complex{1, 0}, Complex{0, 0}, Complex{0, 0}, Complex{-1, 0}};
        default: throw Error("pauli_matrix: index must be 1, 2 or 3");
    }
}

HamiltonianSpec build_pauli_hamiltonian(const ConfigurationGrid& grid, const Vector3Field& a_field,
                                        const std::vector<double>& potential,
                                        const Vector3Field& b_field, double mu, double charge,
                                        double mass) {
    if (grid.dims() > 3) throw Error("pauli: grid dimension must be 1, 2 or 3");
    if (!(mass > 0.0)) throw Error("pauli: mass must be positive");

    HamiltonianSpec spec;
    spec.grid = grid;
    spec.labels = 2;
    spec.kinetic_metric.assign(grid.dims(), 1.0 / mass);
    spec.potential = potential;

    bool any_a = false;
    for (std::size_t c = 0; c < grid.dims(); ++c)
        if (!a_field.comp[c].empty() && !a_field.is_zero(c)) any_a = true;
    if (any_a) {
        VectorPotential A;
        A.charge = charge;
        A.components.assign(grid.dims(), 0.0);
        for (std::size_t c = 0; c < grid.dims(); ++c) {
            if (a_field.comp[c].empty()) continue;
            if (a_field.comp[c].size() != 1)
                throw Error("pauli: only spatially uniform vector potentials are supported");
            A.components[c] = a_field.comp[c][0];
        }
        spec.vector_potential = std::move(A);
    }

    for (int c = 0; c < 3; ++c) {
        const auto& comp = b_field.comp[static_cast<std::size_t>(c)];
        if (comp.empty() || b_field.is_zero(static_cast<std::size_t>(c))) continue;
        CouplingTerm term;
        term.constant = mu;
        term.field = comp;
        term.matrix = pauli_matrix(c + 1);
        spec.label_coupling.push_back(std::move(term));
    }
    spec.validate();
    return spec;
}

HamiltonianSpec build_mode_field_hamiltonian(const ConfigurationGrid& grid,
                                             const ModeBasis& modes) {
    if (modes.size() == 0) throw Error("mode hamiltonian: empty mode basis");
    if (grid.dims() != modes.size())
        throw Error("mode hamiltonian: grid needs one axis per real mode");

    HamiltonianSpec spec;
    spec.grid = grid;
    spec.labels = 1;
    spec.kinetic_metric.assign(grid.dims(), 1.0);
    spec.potential.assign(grid.size(), 0.0);
    std::vector<std::size_t> idx(grid.dims());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        grid.unflatten(i, idx);
        double v = 0.0;
        for (std::size_t a = 0; a < grid.dims(); ++a) {
            const double q = grid.coordinate(a, idx[a]);
            const double w = modes.modes[a].frequency;
            v += 0.5 * w * w * q * q;
        }
        spec.potential[i] = v;
    }
    spec.validate();
    return spec;
}

HamiltonianSpec build_coupled_hamiltonian(const ConfigurationGrid& grid, const ModeBasis& modes,
                                          std::size_t labels,
                                          const std::vector<ModeCoupling>& couplings,
                                          const std::vector<double>& level_energies) {
    if (labels == 0) throw Error("coupled hamiltonian: labels must be positive");
    HamiltonianSpec spec = build_mode_field_hamiltonian(grid, modes);
    spec.labels = labels;

    if (!level_energies.empty()) {
        if (level_energies.size() != labels)
            throw Error("coupled hamiltonian: level_energies needs one entry per label");
        CouplingTerm diag;
        diag.matrix.assign(labels * labels, Complex{0.0, 0.0});
        for (std::size_t f = 0; f < labels; ++f) diag.matrix[f * labels + f] = level_energies[f];
        spec.label_coupling.push_back(std::move(diag));
    }
    for (const ModeCoupling& c : couplings) {
        if (c.mode_index >= modes.size())
            throw Error("coupled hamiltonian: coupling mode index out of range");
        if (!is_hermitian(c.matrix, labels, kHermTol))
            throw Error("coupled hamiltonian: coupling matrix is not Hermitian");
        CouplingTerm term;
        term.axis = static_cast<int>(c.mode_index);
        term.matrix = c.matrix;
        spec.label_coupling.push_back(std::move(term));
    }
    spec.validate();
    return spec;
}

}  // namespace pwsim
