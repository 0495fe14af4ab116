#include "pwsim/wavefunction.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pwsim/interp.hpp"

namespace pwsim {

namespace {
constexpr double kNormTolerance = 1e-12;
}

double DensityField::integral() const {
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc * grid.cell_volume();
}

double DensityField::max_value() const {
    return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

LabeledWavefunction::LabeledWavefunction(ConfigurationGrid grid, std::size_t labels,
                                         std::vector<Complex> amplitudes, double time)
    : grid_(std::move(grid)), labels_(labels), amplitudes_(std::move(amplitudes)), time_(time) {
    if (labels_ == 0) throw Error("wavefunction: need at least one label");
    if (amplitudes_.size() != labels_ * grid_.size())
        throw Error("wavefunction: amplitude count does not match labels * grid size");
    for (const Complex& a : amplitudes_) {
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
            throw Error("wavefunction: non-finite amplitude");
    }
}

LabeledWavefunction LabeledWavefunction::zero(const ConfigurationGrid& grid, std::size_t labels,
                                              double time) {
    return LabeledWavefunction(grid, labels, std::vector<Complex>(labels * grid.size()), time);
}

double LabeledWavefunction::squared_norm() const {
    double acc = 0.0;
    for (const Complex& a : amplitudes_) acc += std::norm(a);
    return acc * grid_.cell_volume();
}

LabeledWavefunction LabeledWavefunction::with_time(double t) const {
    LabeledWavefunction copy = *this;
    copy.time_ = t;
    return copy;
}

LabeledWavefunction normalize(const LabeledWavefunction& psi) {
    const double n2 = psi.squared_norm();
    if (!(n2 > 0.0) || !std::isfinite(n2)) {
        std::ostringstream os;
        os << "normalize: squared norm " << n2 << " is not positive and finite";
        throw Error(os.str());
    }
    const double scale = 1.0 / std::sqrt(n2);
    std::vector<Complex> amps(psi.amplitudes().begin(), psi.amplitudes().end());
    for (Complex& a : amps) a *= scale;
    return LabeledWavefunction(psi.grid(), psi.labels(), std::move(amps), psi.time());
}

DensityField beable_density(const LabeledWavefunction& psi) {
    const std::size_t n = psi.grid().size();
    DensityField rho{psi.grid(), std::vector<double>(n, 0.0), psi.time()};
    for (std::size_t f = 0; f < psi.labels(); ++f) {
        const auto comp = psi.label_component(f);
        for (std::size_t i = 0; i < n; ++i) rho.values[i] += std::norm(comp[i]);
    }
    return rho;
}

ReducedDensitySample reduced_density(const LabeledWavefunction& psi, const BeableConfiguration& q,
                                     const BeableConfiguration& q_prime) {
    const auto node = psi.grid().node_at(q);
    const auto node_prime = psi.grid().node_at(q_prime);
    if (!node || !node_prime)
        throw Error("reduced_density: coordinates must lie on grid nodes");
    Complex value = 0.0;
    for (std::size_t f = 0; f < psi.labels(); ++f)
        value += std::conj(psi.at(f, *node_prime)) * psi.at(f, *node);
    return ReducedDensitySample{q, q_prime, value};
}

Complex inner_product(const LabeledWavefunction& a, const LabeledWavefunction& b) {
    if (a.grid() != b.grid() || a.labels() != b.labels())
        throw Error("inner_product: grid or label mismatch");
    Complex acc = 0.0;
    const auto va = a.amplitudes();
    const auto vb = b.amplitudes();
    for (std::size_t i = 0; i < va.size(); ++i) acc += std::conj(va[i]) * vb[i];
    return acc * a.grid().cell_volume();
}

LabeledWavefunction combine(const LabeledWavefunction& a, const LabeledWavefunction& b, Complex ca,
                            Complex cb) {
    if (a.grid() != b.grid() || a.labels() != b.labels())
        throw Error("combine: grid or label mismatch");
    std::vector<Complex> amps(a.amplitudes().size());
    const auto va = a.amplitudes();
    const auto vb = b.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) amps[i] = ca * va[i] + cb * vb[i];
    return LabeledWavefunction(a.grid(), a.labels(), std::move(amps), a.time());
}

LabeledWavefunction apply_label_matrix(const LabeledWavefunction& psi,
                                       std::span<const Complex> matrix) {
    const std::size_t L = psi.labels();
    if (matrix.size() != L * L) throw Error("apply_label_matrix: matrix size mismatch");
    const std::size_t n = psi.grid().size();
    std::vector<Complex> amps(L * n, Complex{0.0, 0.0});
    for (std::size_t f = 0; f < L; ++f) {
        for (std::size_t g = 0; g < L; ++g) {
            const Complex m = matrix[f * L + g];
            if (m == Complex{0.0, 0.0}) continue;
            const auto src = psi.label_component(g);
            for (std::size_t i = 0; i < n; ++i) amps[f * n + i] += m * src[i];
        }
    }
    return LabeledWavefunction(psi.grid(), L, std::move(amps), psi.time());
}

LabeledWavefunction gaussian_packet(const ConfigurationGrid& grid, const GaussianSpec& spec,
                                    std::vector<Complex> label_weights, double time) {
    const std::size_t d = grid.dims();
    if (spec.centers.size() != d || spec.widths.size() != d)
        throw Error("gaussian_packet: centers/widths must have one entry per axis");
    if (!spec.momenta.empty() && spec.momenta.size() != d)
        throw Error("gaussian_packet: momenta must be empty or one entry per axis");
    if (label_weights.empty()) throw Error("gaussian_packet: need at least one label weight");
    for (double w : spec.widths)
        if (!(w > 0.0)) throw Error("gaussian_packet: widths must be positive");

    const std::size_t n = grid.size();
    const std::size_t L = label_weights.size();
    std::vector<Complex> base(n);
    std::vector<std::size_t> idx(d);
    for (std::size_t i = 0; i < n; ++i) {
        grid.unflatten(i, idx);
        double exponent = 0.0;
        double phase = 0.0;
        for (std::size_t a = 0; a < d; ++a) {
            const double x = grid.coordinate(a, idx[a]);
            const double dx = x - spec.centers[a];
            exponent -= dx * dx / (4.0 * spec.widths[a] * spec.widths[a]);
            if (!spec.momenta.empty()) phase += spec.momenta[a] * x;
        }
        base[i] = std::exp(exponent) * Complex{std::cos(phase), std::sin(phase)};
    }
    std::vector<Complex> amps(L * n);
    for (std::size_t f = 0; f < L; ++f)
        for (std::size_t i = 0; i < n; ++i) amps[f * n + i] = label_weights[f] * base[i];
    return LabeledWavefunction(grid, L, std::move(amps), time);
}

double interpolate_density(const DensityField& rho, const BeableConfiguration& q) {
    InterpStencil s = make_stencil(rho.grid, q);
    if (!s.inside) return 0.0;
    return s.apply(rho.values);
}

}  // namespace pwsim
