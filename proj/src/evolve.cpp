#include "pwsim/evolve.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pwsim {

namespace {

Complex phase_of(double angle) { return Complex{std::cos(angle), std::sin(angle)}; }

bool all_finite(std::span<const Complex> v) {
    for (const Complex& z : v)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

// exp(-i theta M) for Hermitian M (row-major L x L).
void hermitian_phase_exp(const std::vector<Complex>& m, std::size_t L, double theta,
                         std::vector<Complex>& out) {
    Eigen::MatrixXcd M(L, L);
    for (std::size_t i = 0; i < L; ++i)
        for (std::size_t j = 0; j < L; ++j) M(static_cast<long>(i), static_cast<long>(j)) = m[i * L + j];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(M);
    Eigen::VectorXcd ph(L);
    for (std::size_t i = 0; i < L; ++i)
        ph(static_cast<long>(i)) = phase_of(-theta * solver.eigenvalues()(static_cast<long>(i)));
    Eigen::MatrixXcd U = solver.eigenvectors() * ph.asDiagonal() *
                         solver.eigenvectors().adjoint();
    out.resize(L * L);
    for (std::size_t i = 0; i < L; ++i)
        for (std::size_t j = 0; j < L; ++j) out[i * L + j] = U(static_cast<long>(i), static_cast<long>(j));
}

}  // namespace

struct SplitStepEvolver::Impl {
    enum class LocalMode { phase_only, phase_times_const_matrix, full_matrix };

    std::unique_ptr<SpectralWorkspace> spectral;

    // Periodic: exp(-i dt theta_f(k)) / N per label and spectral node.
    std::vector<Complex> kinetic_phase;

    LocalMode local_mode = LocalMode::phase_only;
    std::vector<Complex> local_phase;         // per node, half step
    std::vector<Complex> const_matrix_half;   // L x L, half step
    std::vector<Complex> local_matrix_half;   // per node L x L, half step

    // Reflecting Crank-Nicolson sweep coefficients per (axis, label).
    struct CnAxis {
        Complex b_diag, b_off_up, b_off_dn;          // explicit half matrix rows
        std::vector<Complex> c_prime;                // forward-eliminated uppers
        std::vector<Complex> inv_denom;              // 1 / (a_diag - a_lo * c'_{j-1})
        Complex a_off_up, a_off_dn;
    };
    std::vector<std::vector<CnAxis>> cn;  // [label][axis]

    std::vector<Complex> scratch;
    std::vector<Complex> line_buf;
};

SplitStepEvolver::SplitStepEvolver(const HamiltonianSpec& hamiltonian, double dt)
    : hamiltonian_(hamiltonian), dt_(dt), impl_(std::make_unique<Impl>()) {
    hamiltonian_.validate();
    if (!(dt > 0.0) || !std::isfinite(dt)) throw Error("evolve: dt must be positive");

    const ConfigurationGrid& g = hamiltonian_.grid;
    const std::size_t N = g.size();
    const std::size_t L = hamiltonian_.labels;
    const std::size_t d = g.dims();

    for (std::size_t a = 0; a < d; ++a) {
        const double bound = g.spacing(a) * g.spacing(a) * hamiltonian_.mass(a);
        if (dt >= bound) {
            std::ostringstream os;
            os << "evolve: dt=" << dt << " exceeds spacing^2*mass=" << bound << " on axis " << a;
            warnings_.push_back(os.str());
            break;
        }
    }

    const bool periodic = g.boundary() == Boundary::periodic;
    if (!periodic && hamiltonian_.vector_potential)
        throw Error("evolve: vector potential requires periodic boundaries");

    if (periodic) {
        impl_->spectral = std::make_unique<SpectralWorkspace>(g, L);
        impl_->kinetic_phase.resize(L * N);
        const double inv_n = 1.0 / static_cast<double>(N);
        std::vector<std::size_t> idx(d);
        for (std::size_t i = 0; i < N; ++i) {
            g.unflatten(i, idx);
            double quad = 0.0;
            std::vector<double> klin(d);
            for (std::size_t a = 0; a < d; ++a) {
                double k = impl_->spectral->wavenumber(a, idx[a]);
                if (hamiltonian_.vector_potential) {
                    k -= hamiltonian_.vector_potential->charge *
                         hamiltonian_.vector_potential->components[a];
                }
                quad += 0.5 * hamiltonian_.kinetic_metric[a] * k * k;
                klin[a] = impl_->spectral->wavenumber_deriv(a, idx[a]);
            }
            for (std::size_t f = 0; f < L; ++f) {
                double theta = quad;
                if (!hamiltonian_.momentum_coupling.empty())
                    for (std::size_t a = 0; a < d; ++a)
                        theta += hamiltonian_.momentum_coupling[f][a] * klin[a];
                impl_->kinetic_phase[f * N + i] = phase_of(-dt * theta) * inv_n;
            }
        }
    } else {
        impl_->cn.resize(L);
        for (std::size_t f = 0; f < L; ++f) {
            impl_->cn[f].resize(d);
            for (std::size_t a = 0; a < d; ++a) {
                const double h = g.spacing(a);
                const double c = hamiltonian_.kinetic_metric[a];
                const double lambda = hamiltonian_.momentum_coupling.empty()
                                          ? 0.0
                                          : hamiltonian_.momentum_coupling[f][a];
                // O = -(c/2) d^2/dx^2 + lambda p, zero beyond walls.
                const Complex o_diag{c / (h * h), 0.0};
                const Complex o_up = Complex{-c / (2.0 * h * h), 0.0} +
                                     Complex{0.0, -lambda / (2.0 * h)};
                const Complex o_dn = Complex{-c / (2.0 * h * h), 0.0} +
                                     Complex{0.0, lambda / (2.0 * h)};
                const Complex half = Complex{0.0, 0.5 * dt};
                Impl::CnAxis axis;
                const Complex a_diag = Complex{1.0, 0.0} + half * o_diag;
                axis.a_off_up = half * o_up;
                axis.a_off_dn = half * o_dn;
                axis.b_diag = Complex{1.0, 0.0} - half * o_diag;
                axis.b_off_up = -half * o_up;
                axis.b_off_dn = -half * o_dn;
                const std::size_t na = g.axis(a).points;
                axis.c_prime.resize(na);
                axis.inv_denom.resize(na);
                Complex prev_c{0.0, 0.0};
                for (std::size_t j = 0; j < na; ++j) {
                    const Complex denom = a_diag - (j > 0 ? axis.a_off_dn * prev_c : Complex{});
                    axis.inv_denom[j] = 1.0 / denom;
                    prev_c = axis.a_off_up * axis.inv_denom[j];
                    axis.c_prime[j] = prev_c;
                }
                impl_->cn[f][a] = std::move(axis);
            }
        }
        const auto widest = std::max_element(
            g.axes().begin(), g.axes().end(),
            [](const AxisSpec& x, const AxisSpec& y) { return x.points < y.points; });
        impl_->line_buf.resize(widest->points);
    }

    // Local (position-diagonal) half-step factors.
    const double half_dt = 0.5 * dt;
    bool any_coupling = !hamiltonian_.label_coupling.empty();
    bool all_constant = true;
    for (const CouplingTerm& t : hamiltonian_.label_coupling)
        if (t.axis >= 0 || t.field.size() > 1) all_constant = false;

    auto potential_at = [&](std::size_t i) {
        return hamiltonian_.potential.empty() ? 0.0 : hamiltonian_.potential[i];
    };

    if (L == 1) {
        impl_->local_mode = Impl::LocalMode::phase_only;
        impl_->local_phase.resize(N);
        for (std::size_t i = 0; i < N; ++i) {
            double v = potential_at(i);
            for (const CouplingTerm& t : hamiltonian_.label_coupling)
                v += t.value_at(g, i) * t.matrix[0].real();
            impl_->local_phase[i] = phase_of(-half_dt * v);
        }
    } else if (!any_coupling) {
        impl_->local_mode = Impl::LocalMode::phase_only;
        impl_->local_phase.resize(N);
        for (std::size_t i = 0; i < N; ++i) impl_->local_phase[i] = phase_of(-half_dt * potential_at(i));
    } else if (all_constant) {
        impl_->local_mode = Impl::LocalMode::phase_times_const_matrix;
        impl_->local_phase.resize(N);
        for (std::size_t i = 0; i < N; ++i) impl_->local_phase[i] = phase_of(-half_dt * potential_at(i));
        std::vector<Complex> m(L * L, Complex{});
        for (const CouplingTerm& t : hamiltonian_.label_coupling) {
            const double c = t.constant * (t.field.empty() ? 1.0 : t.field[0]);
            for (std::size_t i = 0; i < L * L; ++i) m[i] += c * t.matrix[i];
        }
        hermitian_phase_exp(m, L, half_dt, impl_->const_matrix_half);
    } else {
        impl_->local_mode = Impl::LocalMode::full_matrix;
        impl_->local_matrix_half.resize(N * L * L);
        std::vector<Complex> m;
        std::vector<Complex> u;
        for (std::size_t i = 0; i < N; ++i) {
            hamiltonian_.local_matrix(i, m);
            hermitian_phase_exp(m, L, half_dt, u);
            std::copy(u.begin(), u.end(), impl_->local_matrix_half.begin() + static_cast<long>(i * L * L));
        }
    }
    impl_->scratch.resize(L);
}

SplitStepEvolver::~SplitStepEvolver() = default;

void SplitStepEvolver::load(const LabeledWavefunction& psi) {
    if (psi.grid() != hamiltonian_.grid || psi.labels() != hamiltonian_.labels)
        throw Error("evolve: state does not match hamiltonian grid/labels");
    state_.assign(psi.amplitudes().begin(), psi.amplitudes().end());
    time_ = psi.time();
    steps_taken_ = 0;
}

namespace {
void apply_local_phase(std::vector<Complex>& state, const std::vector<Complex>& phase,
                       std::size_t labels, std::size_t n) {
    for (std::size_t f = 0; f < labels; ++f) {
        Complex* comp = state.data() + f * n;
        for (std::size_t i = 0; i < n; ++i) comp[i] *= phase[i];
    }
}

void apply_label_matrix_inplace(std::vector<Complex>& state, const Complex* m, std::size_t labels,
                                std::size_t n, std::size_t node, Complex* scratch) {
    for (std::size_t f = 0; f < labels; ++f) {
        Complex acc{0.0, 0.0};
        for (std::size_t g = 0; g < labels; ++g) acc += m[f * labels + g] * state[g * n + node];
        scratch[f] = acc;
    }
    for (std::size_t f = 0; f < labels; ++f) state[f * n + node] = scratch[f];
}
}  // namespace

void SplitStepEvolver::step(std::size_t count) {
    const ConfigurationGrid& g = hamiltonian_.grid;
    const std::size_t N = g.size();
    const std::size_t L = hamiltonian_.labels;
    if (state_.empty()) throw Error("evolve: no state loaded");

    for (std::size_t s = 0; s < count; ++s) {
        auto local_half = [&] {
            switch (impl_->local_mode) {
                case Impl::LocalMode::phase_only:
                    apply_local_phase(state_, impl_->local_phase, L, N);
                    break;
                case Impl::LocalMode::phase_times_const_matrix:
                    apply_local_phase(state_, impl_->local_phase, L, N);
                    for (std::size_t i = 0; i < N; ++i)
                        apply_label_matrix_inplace(state_, impl_->const_matrix_half.data(), L, N, i,
                                                   impl_->scratch.data());
                    break;
                case Impl::LocalMode::full_matrix:
                    for (std::size_t i = 0; i < N; ++i)
                        apply_label_matrix_inplace(state_, impl_->local_matrix_half.data() + i * L * L,
                                                   L, N, i, impl_->scratch.data());
                    break;
            }
        };

        local_half();

        if (g.boundary() == Boundary::periodic) {
            impl_->spectral->fft_forward(state_.data());
            for (std::size_t i = 0; i < L * N; ++i) state_[i] *= impl_->kinetic_phase[i];
            impl_->spectral->fft_backward(state_.data());
        } else {
            for (std::size_t f = 0; f < L; ++f) {
                Complex* comp = state_.data() + f * N;
                for (std::size_t a = 0; a < g.dims(); ++a) {
                    const Impl::CnAxis& ax = impl_->cn[f][a];
                    const std::size_t stride = g.stride(a);
                    const std::size_t na = g.axis(a).points;
                    const std::size_t block = na * stride;
                    Complex* rhs = impl_->line_buf.data();
                    for (std::size_t outer = 0; outer < N / block; ++outer) {
                        for (std::size_t inner = 0; inner < stride; ++inner) {
                            Complex* base = comp + outer * block + inner;
                            // rhs = B psi (explicit half)
                            for (std::size_t j = 0; j < na; ++j) {
                                Complex acc = ax.b_diag * base[j * stride];
                                if (j > 0) acc += ax.b_off_dn * base[(j - 1) * stride];
                                if (j + 1 < na) acc += ax.b_off_up * base[(j + 1) * stride];
                                rhs[j] = acc;
                            }
                            // Thomas solve A psi' = rhs
                            rhs[0] *= ax.inv_denom[0];
                            for (std::size_t j = 1; j < na; ++j)
                                rhs[j] = (rhs[j] - ax.a_off_dn * rhs[j - 1]) * ax.inv_denom[j];
                            base[(na - 1) * stride] = rhs[na - 1];
                            for (std::size_t j = na - 1; j-- > 0;)
                                base[j * stride] = rhs[j] - ax.c_prime[j] * base[(j + 1) * stride];
                        }
                    }
                }
            }
        }

        local_half();

        ++steps_taken_;
        time_ += dt_;
        if (!all_finite(state_)) {
            std::ostringstream os;
            os << "evolve: non-finite amplitudes after step " << steps_taken_;
            throw Error(os.str());
        }
    }
}

LabeledWavefunction SplitStepEvolver::snapshot() const {
    return LabeledWavefunction(hamiltonian_.grid, hamiltonian_.labels, state_, time_);
}

LabeledWavefunction evolve(const LabeledWavefunction& psi, const HamiltonianSpec& hamiltonian,
                           double dt, std::size_t steps) {
    SplitStepEvolver evolver(hamiltonian, dt);
    evolver.load(psi);
    evolver.step(steps);
    return evolver.snapshot();
}

double expectation(const LabeledWavefunction& psi, const Observable& obs) {
    const ConfigurationGrid& g = psi.grid();
    const std::size_t n = g.size();
    switch (obs.kind) {
        case Observable::Kind::identity:
            return psi.squared_norm();
        case Observable::Kind::position:
            if (obs.axis >= g.dims()) throw Error("expectation: axis out of range");
            return position_expectation(psi, obs.axis);
        case Observable::Kind::momentum: {
            if (obs.axis >= g.dims()) throw Error("expectation: axis out of range");
            SpectralWorkspace ws(g, psi.labels());
            return momentum_expectation(psi, obs.axis, ws);
        }
        case Observable::Kind::scalar_field: {
            if (obs.field.size() != n)
                throw Error("expectation: observable field does not match grid");
            double acc = 0.0;
            for (std::size_t f = 0; f < psi.labels(); ++f) {
                const auto comp = psi.label_component(f);
                for (std::size_t i = 0; i < n; ++i) acc += obs.field[i] * std::norm(comp[i]);
            }
            return acc * g.cell_volume();
        }
        case Observable::Kind::label_matrix: {
            const std::size_t L = psi.labels();
            if (!is_hermitian(obs.label_matrix, L))
                throw Error("expectation: label matrix is not Hermitian");
            Complex acc{0.0, 0.0};
            for (std::size_t f = 0; f < L; ++f)
                for (std::size_t h = 0; h < L; ++h) {
                    const Complex m = obs.label_matrix[f * L + h];
                    if (m == Complex{}) continue;
                    const auto cf = psi.label_component(f);
                    const auto ch = psi.label_component(h);
                    Complex sum{0.0, 0.0};
                    for (std::size_t i = 0; i < n; ++i) sum += std::conj(cf[i]) * ch[i];
                    acc += m * sum;
                }
            acc *= g.cell_volume();
            if (std::abs(acc.imag()) > 1e-10 * (1.0 + std::abs(acc.real())))
                throw Error("expectation: imaginary residue too large");
            return acc.real();
        }
    }
    throw Error("expectation: unknown observable");
}

LabeledWavefunction apply_hamiltonian(const LabeledWavefunction& psi, const HamiltonianSpec& h) {
    h.validate();
    const ConfigurationGrid& g = h.grid;
    if (psi.grid() != g || psi.labels() != h.labels)
        throw Error("apply_hamiltonian: state does not match hamiltonian");
    const std::size_t N = g.size();
    const std::size_t L = h.labels;
    const std::size_t d = g.dims();
    std::vector<Complex> out(L * N, Complex{});

    if (g.boundary() == Boundary::periodic) {
        SpectralWorkspace ws(g, L);
        std::vector<Complex> spec(psi.amplitudes().begin(), psi.amplitudes().end());
        ws.fft_forward(spec.data());
        const double inv_n = 1.0 / static_cast<double>(N);
        std::vector<std::size_t> idx(d);
        std::vector<double> lin(d);
        for (std::size_t i = 0; i < N; ++i) {
            g.unflatten(i, idx);
            double quad = 0.0;
            for (std::size_t a = 0; a < d; ++a) {
                double k = ws.wavenumber(a, idx[a]);
                if (h.vector_potential)
                    k -= h.vector_potential->charge * h.vector_potential->components[a];
                quad += 0.5 * h.kinetic_metric[a] * k * k;
                lin[a] = ws.wavenumber_deriv(a, idx[a]);
            }
            for (std::size_t f = 0; f < L; ++f) {
                double theta = quad;
                if (!h.momentum_coupling.empty())
                    for (std::size_t a = 0; a < d; ++a) theta += h.momentum_coupling[f][a] * lin[a];
                spec[f * N + i] *= theta * inv_n;
            }
        }
        ws.fft_backward(spec.data());
        out = std::move(spec);
    } else {
        // Kinetic by second differences, drift by central differences.
        for (std::size_t f = 0; f < L; ++f) {
            const auto comp = psi.label_component(f);
            Complex* dst = out.data() + f * N;
            for (std::size_t a = 0; a < d; ++a) {
                const std::size_t stride = g.stride(a);
                const std::size_t na = g.axis(a).points;
                const double c = h.kinetic_metric[a];
                const double h2 = g.spacing(a) * g.spacing(a);
                const double lambda = h.momentum_coupling.empty() ? 0.0 : h.momentum_coupling[f][a];
                for (std::size_t i = 0; i < N; ++i) {
                    const std::size_t j = (i / stride) % na;
                    const Complex up = (j + 1 < na) ? comp[i + stride] : Complex{};
                    const Complex dn = (j > 0) ? comp[i - stride] : Complex{};
                    dst[i] += -0.5 * c * (up - 2.0 * comp[i] + dn) / h2;
                    if (lambda != 0.0)
                        dst[i] += Complex{0.0, -lambda} * (up - dn) / (2.0 * g.spacing(a));
                }
            }
        }
    }

    std::vector<Complex> m;
    std::vector<Complex> scratch(L);
    for (std::size_t i = 0; i < N; ++i) {
        h.local_matrix(i, m);
        for (std::size_t f = 0; f < L; ++f) {
            Complex acc{0.0, 0.0};
            for (std::size_t gg = 0; gg < L; ++gg) acc += m[f * L + gg] * psi.at(gg, i);
            scratch[f] = acc;
        }
        for (std::size_t f = 0; f < L; ++f) out[f * N + i] += scratch[f];
    }
    return LabeledWavefunction(g, L, std::move(out), psi.time());
}

double energy_expectation(const LabeledWavefunction& psi, const HamiltonianSpec& h) {
    const Complex e = inner_product(psi, apply_hamiltonian(psi, h));
    if (std::abs(e.imag()) > 1e-10 * (1.0 + std::abs(e.real())))
        throw Error("energy_expectation: imaginary residue too large");
    return e.real();
}

}  // namespace pwsim
