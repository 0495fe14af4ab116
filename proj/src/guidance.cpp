#include "pwsim/guidance.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "pwsim/interp.hpp"

namespace pwsim {

CurrentField current(const LabeledWavefunction& psi, const HamiltonianSpec& hamiltonian) {
    SpectralWorkspace ws(psi.grid(), psi.labels());
    return current(psi, hamiltonian, ws);
}

CurrentField current(const LabeledWavefunction& psi, const HamiltonianSpec& hamiltonian,
                     SpectralWorkspace& ws) {
    if (psi.grid() != hamiltonian.grid || psi.labels() != hamiltonian.labels)
        throw Error("current: state does not match hamiltonian grid/labels");
    const ConfigurationGrid& g = psi.grid();
    const std::size_t n = g.size();
    const std::size_t d = g.dims();
    const std::size_t L = psi.labels();

    CurrentField j{g, std::vector<std::vector<double>>(d, std::vector<double>(n, 0.0)),
                   psi.time()};
    std::vector<Complex> grad(L * n);
    std::vector<double> rho;  // filled lazily for the A and drift terms

    for (std::size_t a = 0; a < d; ++a) {
        ws.gradient(psi.amplitudes(), a, grad);
        const double metric = hamiltonian.kinetic_metric[a];
        std::vector<double>& comp = j.components[a];
        for (std::size_t f = 0; f < L; ++f) {
            const Complex* amp = psi.amplitudes().data() + f * n;
            const Complex* gr = grad.data() + f * n;
            for (std::size_t i = 0; i < n; ++i)
                comp[i] += metric * std::imag(std::conj(amp[i]) * gr[i]);
        }

        const bool has_a = hamiltonian.vector_potential &&
                           hamiltonian.vector_potential->components[a] != 0.0;
        const bool has_drift = !hamiltonian.momentum_coupling.empty();
        if (!has_a && !has_drift) continue;

        for (std::size_t f = 0; f < L; ++f) {
            double coeff = 0.0;
            if (has_a)
                coeff -= metric * hamiltonian.vector_potential->charge *
                         hamiltonian.vector_potential->components[a];
            if (has_drift) coeff += hamiltonian.momentum_coupling[f][a];
            if (coeff == 0.0) continue;
            const Complex* amp = psi.amplitudes().data() + f * n;
            for (std::size_t i = 0; i < n; ++i) comp[i] += coeff * std::norm(amp[i]);
        }
    }
    return j;
}

VelocityField velocity_field(const DensityField& rho, const CurrentField& j) {
    if (rho.grid != j.grid) throw Error("velocity_field: density/current grid mismatch");
    if (rho.time != j.time) throw Error("velocity_field: density/current time mismatch");
    const std::size_t n = rho.grid.size();
    const std::size_t d = rho.grid.dims();
    VelocityField v{rho.grid, std::vector<std::vector<double>>(d, std::vector<double>(n, 0.0)),
                    std::vector<std::uint8_t>(n, 0), rho.time, 0.0};
    const double eps = kNodeEpsilonRelative * rho.max_value();
    for (std::size_t i = 0; i < n; ++i) {
        if (!(rho.values[i] >= eps) || eps == 0.0) {
            v.node_mask[i] = 1;
            continue;
        }
        const double inv = 1.0 / rho.values[i];
        double speed2 = 0.0;
        for (std::size_t a = 0; a < d; ++a) {
            const double val = j.components[a][i] * inv;
            v.components[a][i] = val;
            speed2 += val * val;
        }
        v.max_speed = std::max(v.max_speed, std::sqrt(speed2));
    }
    return v;
}

namespace {

struct VelocityProbe {
    const VelocitySpan& span;
    double t0, t1;
    InterpStencil stencil;

    explicit VelocityProbe(const VelocitySpan& s)
        : span(s), t0(s.before->time), t1(s.after->time) {}

    // Fills out[a]; returns speed. Throws TrajectoryEscape outside a
    // reflecting grid.
    double eval(const BeableConfiguration& q, double t, std::span<double> out) {
        const ConfigurationGrid& g = span.before->grid;
        make_stencil(g, q, stencil);
        if (!stencil.inside) {
            std::ostringstream os;
            os << "trajectory escaped reflecting grid at t=" << t;
            throw TrajectoryEscape(os.str());
        }
        double w = (t1 > t0) ? (t - t0) / (t1 - t0) : 0.0;
        w = std::clamp(w, 0.0, 1.0);
        double speed2 = 0.0;
        for (std::size_t a = 0; a < g.dims(); ++a) {
            const double v0 = stencil.apply(span.before->components[a]);
            const double v1 = stencil.apply(span.after->components[a]);
            out[a] = (1.0 - w) * v0 + w * v1;
            speed2 += out[a] * out[a];
        }
        return std::sqrt(speed2);
    }
};

void wrap_in_place(const ConfigurationGrid& g, BeableConfiguration& q) {
    if (g.boundary() != Boundary::periodic) return;
    for (std::size_t a = 0; a < g.dims(); ++a) q[a] = g.wrap(a, q[a]);
}

}  // namespace

BeableConfiguration step_trajectory(const BeableConfiguration& q, const VelocitySpan& v, double t,
                                    double dt, int max_halvings) {
    if (!v.before || !v.after) throw Error("step_trajectory: velocity span not set");
    const ConfigurationGrid& g = v.before->grid;
    if (q.size() != g.dims()) throw Error("step_trajectory: dimension mismatch");

    VelocityProbe probe(v);
    const std::size_t d = g.dims();
    std::vector<double> k1(d), k2(d), k3(d), k4(d);
    BeableConfiguration pos = q;

    const double speed0 = probe.eval(pos, t, k1);
    std::size_t substeps = 1;
    const double h_min = g.min_spacing();
    for (int i = 0; i < max_halvings && speed0 * (dt / static_cast<double>(substeps)) > 0.5 * h_min;
         ++i)
        substeps *= 2;

    const double h = dt / static_cast<double>(substeps);
    BeableConfiguration tmp(std::vector<double>(d, 0.0));
    double tau = t;
    for (std::size_t s = 0; s < substeps; ++s) {
        probe.eval(pos, tau, k1);
        for (std::size_t a = 0; a < d; ++a) tmp[a] = pos[a] + 0.5 * h * k1[a];
        probe.eval(tmp, tau + 0.5 * h, k2);
        for (std::size_t a = 0; a < d; ++a) tmp[a] = pos[a] + 0.5 * h * k2[a];
        probe.eval(tmp, tau + 0.5 * h, k3);
        for (std::size_t a = 0; a < d; ++a) tmp[a] = pos[a] + h * k3[a];
        probe.eval(tmp, tau + h, k4);
        for (std::size_t a = 0; a < d; ++a)
            pos[a] += (h / 6.0) * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
        wrap_in_place(g, pos);
        tau += h;
    }
    return pos;
}

namespace {
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), count);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += workers) fn(i);
        });
    }
    for (std::thread& th : pool) th.join();
}
}  // namespace

EnsembleRun propagate_ensemble(std::span<const BeableConfiguration> starts,
                               const LabeledWavefunction& psi0, const HamiltonianSpec& hamiltonian,
                               double dt, std::size_t steps, const PropagateOptions& opts_in) {
    PropagateOptions options = opts_in;
    if (options.store_stride == 0) options.store_stride = 1;
    SplitStepEvolver evolver(hamiltonian, dt);
    evolver.load(psi0);
    SpectralWorkspace ws(psi0.grid(), psi0.labels());

    auto make_velocity = [&](const LabeledWavefunction& psi) {
        DensityField rho = beable_density(psi);
        CurrentField j = current(psi, hamiltonian, ws);
        VelocityField v = velocity_field(rho, j);
        if (options.velocity_scale != 1.0) {
            for (auto& comp : v.components)
                for (double& x : comp) x *= options.velocity_scale;
            v.max_speed *= options.velocity_scale;
        }
        return v;
    };

    EnsembleRun run{{}, {}, psi0, 0.0, {}};
    run.trajectories.resize(starts.size());
    std::vector<std::uint8_t> dead(starts.size(), 0);
    std::vector<BeableConfiguration> pos(starts.begin(), starts.end());
    for (std::size_t i = 0; i < starts.size(); ++i) {
        run.trajectories[i].times.push_back(psi0.time());
        run.trajectories[i].points.push_back(starts[i]);
    }
    if (options.on_step) options.on_step(0, psi0);

    LabeledWavefunction psi_prev = psi0;
    VelocityField v_prev = make_velocity(psi0);
    std::vector<std::string> abort_messages(starts.size());

    for (std::size_t s = 0; s < steps; ++s) {
        evolver.step();
        LabeledWavefunction psi_next = evolver.snapshot();
        VelocityField v_next = make_velocity(psi_next);
        run.max_speed = std::max({run.max_speed, v_prev.max_speed, v_next.max_speed});
        const VelocitySpan span{&v_prev, &v_next};
        const double t = v_prev.time;
        const bool store = ((s + 1) % options.store_stride == 0) || (s + 1 == steps);

        parallel_for(starts.size(), options.threads, [&](std::size_t i) {
            if (dead[i]) return;
            try {
                pos[i] = step_trajectory(pos[i], span, t, dt, options.max_halvings);
            } catch (const TrajectoryEscape& e) {
                dead[i] = 1;
                abort_messages[i] = e.what();
                return;
            }
            if (store) {
                run.trajectories[i].times.push_back(v_next.time);
                run.trajectories[i].points.push_back(pos[i]);
            }
        });

        if (options.on_step) options.on_step(s + 1, psi_next);
        v_prev = std::move(v_next);
        psi_prev = std::move(psi_next);
    }

    for (std::size_t i = 0; i < starts.size(); ++i) {
        if (dead[i]) {
            run.aborted.push_back(i);
            run.warnings.push_back("trajectory " + std::to_string(i) + ": " + abort_messages[i]);
        }
    }
    run.final_state = psi_prev;
    for (const std::string& w : evolver.warnings()) run.warnings.push_back(w);
    return run;
}

double continuity_residual(const DensityField& rho_minus, const CurrentField& j,
                           const DensityField& rho_plus, double dt) {
    const ConfigurationGrid& g = j.grid;
    if (rho_minus.grid != g || rho_plus.grid != g)
        throw Error("continuity_residual: grid mismatch");
    const std::size_t n = g.size();
    const std::size_t d = g.dims();
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double res = (rho_plus.values[i] - rho_minus.values[i]) / (2.0 * dt);
        for (std::size_t a = 0; a < d; ++a) {
            const std::size_t stride = g.stride(a);
            const std::size_t na = g.axis(a).points;
            const std::size_t idx_a = (i / stride) % na;
            double up, dn;
            if (g.boundary() == Boundary::periodic) {
                up = j.components[a][idx_a + 1 < na ? i + stride : i - (na - 1) * stride];
                dn = j.components[a][idx_a > 0 ? i - stride : i + (na - 1) * stride];
            } else {
                up = idx_a + 1 < na ? j.components[a][i + stride] : 0.0;
                dn = idx_a > 0 ? j.components[a][i - stride] : 0.0;
            }
            res += (up - dn) / (2.0 * g.spacing(a));
        }
        worst = std::max(worst, std::abs(res));
    }
    return worst;
}

}  // namespace pwsim
