// wavefunction.hpp — labeled wavefunctions on configuration grids.
//
// A LabeledWavefunction stores complex amplitudes over (label, grid node):
// the label index runs over the degrees of freedom that carry no beables
// (spin components, fermionic sector levels), the grid over those that do.
// The beable density is the label-traced diagonal of the density matrix.
// All types are immutable snapshots; operations return new values.

#pragma once

#include <complex>
#include <span>
#include <vector>

#include "pwsim/grid.hpp"

namespace pwsim {

using Complex = std::complex<double>;

struct DensityField {
    ConfigurationGrid grid;
    std::vector<double> values;  // one per node, >= 0
    double time = 0.0;

    double integral() const;
    double max_value() const;
};

struct ReducedDensitySample {
    BeableConfiguration q;
    BeableConfiguration q_prime;
    Complex value;
};

class LabeledWavefunction {
public:
    LabeledWavefunction() = default;

    // Validates finiteness of every amplitude.
    LabeledWavefunction(ConfigurationGrid grid, std::size_t labels, std::vector<Complex> amplitudes,
                        double time = 0.0);

    // Zero-filled state.
    static LabeledWavefunction zero(const ConfigurationGrid& grid, std::size_t labels,
                                    double time = 0.0);

    const ConfigurationGrid& grid() const { return grid_; }
    std::size_t labels() const { return labels_; }
    double time() const { return time_; }

    std::span<const Complex> amplitudes() const { return amplitudes_; }
    std::span<const Complex> label_component(std::size_t f) const {
        return std::span<const Complex>(amplitudes_).subspan(f * grid_.size(), grid_.size());
    }
    Complex at(std::size_t f, std::size_t node) const {
        return amplitudes_[f * grid_.size() + node];
    }

    double squared_norm() const;

    LabeledWavefunction with_time(double t) const;

private:
    friend LabeledWavefunction combine(const LabeledWavefunction&, const LabeledWavefunction&,
                                       Complex, Complex);
    ConfigurationGrid grid_;
    std::size_t labels_ = 0;
    std::vector<Complex> amplitudes_;  // label-major: amplitudes_[f*N + node]
    double time_ = 0.0;
};

// Rescales to unit squared norm; phases untouched. Rejects zero or non-finite
// norm.
LabeledWavefunction normalize(const LabeledWavefunction& psi);

// rho(q) = sum_f |Psi_f(q)|^2 at every node; integral equals squared norm.
DensityField beable_density(const LabeledWavefunction& psi);

// Label-traced density matrix element sum_f conj(Psi_f(q'))*Psi_f(q); both
// arguments must lie on grid nodes.
ReducedDensitySample reduced_density(const LabeledWavefunction& psi, const BeableConfiguration& q,
                                     const BeableConfiguration& q_prime);

// sum_f sum_nodes conj(a_f) b_f * cell volume. Grids and label counts must
// match.
Complex inner_product(const LabeledWavefunction& a, const LabeledWavefunction& b);

// ca*a + cb*b on a shared grid.
LabeledWavefunction combine(const LabeledWavefunction& a, const LabeledWavefunction& b, Complex ca,
                            Complex cb);

// Applies an L x L matrix (row-major) to the label index.
LabeledWavefunction apply_label_matrix(const LabeledWavefunction& psi,
                                       std::span<const Complex> matrix);

struct GaussianSpec {
    std::vector<double> centers;   // per axis
    std::vector<double> widths;    // per axis; |psi|^2 std dev, psi ~ exp(-(x-c)^2/(4 w^2))
    std::vector<double> momenta;   // per axis phase gradient, may be empty (= 0)
};

// Product Gaussian packet with plane phase, multiplied by per-label weights;
// not normalized.
LabeledWavefunction gaussian_packet(const ConfigurationGrid& grid, const GaussianSpec& spec,
                                    std::vector<Complex> label_weights, double time = 0.0);

// Multilinear interpolation of a density field at an arbitrary point
// (periodic wrap or clamped per grid boundary).
double interpolate_density(const DensityField& rho, const BeableConfiguration& q);

}  // namespace pwsim
