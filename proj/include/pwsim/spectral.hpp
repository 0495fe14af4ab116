// spectral.hpp — FFT plans and derivative machinery shared by the evolver,
// the probability current and momentum expectations.

#pragma once

#include <memory>
#include <span>
#include <vector>

#include "pwsim/grid.hpp"
#include "pwsim/wavefunction.hpp"

namespace pwsim {

// Owns FFTW plans for batched in-place transforms of L label components over
// the grid, plus wavenumber tables. Under reflecting boundaries derivatives
// fall back to central differences with zero ghosts and no plans are made.
// One workspace per thread of use; plan creation is internally serialized.
class SpectralWorkspace {
public:
    SpectralWorkspace(const ConfigurationGrid& grid, std::size_t labels);
    ~SpectralWorkspace();
    SpectralWorkspace(const SpectralWorkspace&) = delete;
    SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

    const ConfigurationGrid& grid() const { return grid_; }
    std::size_t labels() const { return labels_; }

    // Unnormalized in-place transforms of a (labels * grid.size()) array.
    void fft_forward(Complex* data);
    void fft_backward(Complex* data);

    // d/dq_axis per label component. Spectral under periodic boundaries
    // (Nyquist derivative bin zeroed), second-order central differences with
    // zero ghosts under reflecting.
    void gradient(std::span<const Complex> in, std::size_t axis, std::span<Complex> out);

    // Wavenumber of spectral bin j on an axis, Nyquist mapped to +pi/h.
    double wavenumber(std::size_t axis, std::size_t j) const { return kvals_[axis][j]; }
    // Same but Nyquist mapped to 0 (odd-derivative convention).
    double wavenumber_deriv(std::size_t axis, std::size_t j) const { return kderiv_[axis][j]; }

private:
    struct Plans;
    ConfigurationGrid grid_;
    std::size_t labels_ = 0;
    std::vector<std::vector<double>> kvals_;
    std::vector<std::vector<double>> kderiv_;
    std::unique_ptr<Plans> plans_;
    std::vector<Complex> scratch_;
};

// Per-label mean of -i d/dq_axis (label-traced momentum expectation).
double momentum_expectation(const LabeledWavefunction& psi, std::size_t axis,
                            SpectralWorkspace& ws);

// Mean of coordinate q_axis under the beable density.
double position_expectation(const LabeledWavefunction& psi, std::size_t axis);

}  // namespace pwsim
