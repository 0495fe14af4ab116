#include "pwsim/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

namespace pwsim {

namespace {
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

struct SpectralWorkspace::Plans {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
    ~Plans() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        if (forward) fftw_destroy_plan(forward);
        if (backward) fftw_destroy_plan(backward);
    }
};

SpectralWorkspace::SpectralWorkspace(const ConfigurationGrid& grid, std::size_t labels)
    : grid_(grid), labels_(labels) {
    const std::size_t d = grid_.dims();
    kvals_.resize(d);
    kderiv_.resize(d);
    for (std::size_t a = 0; a < d; ++a) {
        const std::size_t n = grid_.axis(a).points;
        const double length = grid_.axis(a).max - grid_.axis(a).min;
        kvals_[a].resize(n);
        kderiv_[a].resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double m = (j <= n / 2) ? static_cast<double>(j)
                                          : static_cast<double>(j) - static_cast<double>(n);
            const double k = 2.0 * std::numbers::pi * m / length;
            kvals_[a][j] = k;
            kderiv_[a][j] = (n % 2 == 0 && j == n / 2) ? 0.0 : k;
        }
    }

    if (grid_.boundary() == Boundary::periodic) {
        scratch_.resize(labels_ * grid_.size());
        std::vector<int> n(d);
        for (std::size_t a = 0; a < d; ++a) n[a] = static_cast<int>(grid_.axis(a).points);
        auto* buf = reinterpret_cast<fftw_complex*>(scratch_.data());
        const int total = static_cast<int>(grid_.size());
        std::lock_guard<std::mutex> lock(planner_mutex());
        plans_ = std::make_unique<Plans>();
        plans_->forward = fftw_plan_many_dft(static_cast<int>(d), n.data(),
                                             static_cast<int>(labels_), buf, nullptr, 1, total,
                                             buf, nullptr, 1, total, FFTW_FORWARD,
                                             FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_->backward = fftw_plan_many_dft(static_cast<int>(d), n.data(),
                                              static_cast<int>(labels_), buf, nullptr, 1, total,
                                              buf, nullptr, 1, total, FFTW_BACKWARD,
                                              FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!plans_->forward || !plans_->backward) throw Error("spectral: fftw plan failed");
    }
}

SpectralWorkspace::~SpectralWorkspace() = default;

void SpectralWorkspace::fft_forward(Complex* data) {
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(plans_->forward, p, p);
}

void SpectralWorkspace::fft_backward(Complex* data) {
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(plans_->backward, p, p);
}

void SpectralWorkspace::gradient(std::span<const Complex> in, std::size_t axis,
                                 std::span<Complex> out) {
    const std::size_t n = grid_.size();
    if (in.size() != labels_ * n || out.size() != labels_ * n)
        throw Error("spectral gradient: size mismatch");

    if (grid_.boundary() == Boundary::periodic) {
        std::copy(in.begin(), in.end(), out.begin());
        fft_forward(out.data());
        const std::size_t stride = grid_.stride(axis);
        const std::size_t na = grid_.axis(axis).points;
        const double inv_n = 1.0 / static_cast<double>(n);
        for (std::size_t f = 0; f < labels_; ++f) {
            Complex* comp = out.data() + f * n;
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t j = (i / stride) % na;
                comp[i] *= Complex{0.0, kderiv_[axis][j] * inv_n};
            }
        }
        fft_backward(out.data());
        return;
    }

    // Reflecting: central differences with psi = 0 beyond the walls.
    const std::size_t stride = grid_.stride(axis);
    const std::size_t na = grid_.axis(axis).points;
    const double inv_2h = 0.5 / grid_.spacing(axis);
    for (std::size_t f = 0; f < labels_; ++f) {
        const Complex* src = in.data() + f * n;
        Complex* dst = out.data() + f * n;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = (i / stride) % na;
            const Complex up = (j + 1 < na) ? src[i + stride] : Complex{0.0, 0.0};
            const Complex dn = (j > 0) ? src[i - stride] : Complex{0.0, 0.0};
            dst[i] = (up - dn) * inv_2h;
        }
    }
}

double momentum_expectation(const LabeledWavefunction& psi, std::size_t axis,
                            SpectralWorkspace& ws) {
    const std::size_t n = psi.grid().size();
    std::vector<Complex> grad(psi.labels() * n);
    ws.gradient(psi.amplitudes(), axis, grad);
    double acc = 0.0;
    const auto amps = psi.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i)
        acc += std::imag(std::conj(amps[i]) * grad[i]);
    return acc * psi.grid().cell_volume();
}

double position_expectation(const LabeledWavefunction& psi, std::size_t axis) {
    const ConfigurationGrid& g = psi.grid();
    const std::size_t n = g.size();
    const std::size_t stride = g.stride(axis);
    const std::size_t na = g.axis(axis).points;
    double acc = 0.0;
    for (std::size_t f = 0; f < psi.labels(); ++f) {
        const auto comp = psi.label_component(f);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = (i / stride) % na;
            acc += std::norm(comp[i]) * g.coordinate(axis, j);
        }
    }
    return acc * g.cell_volume();
}

}  // namespace pwsim
