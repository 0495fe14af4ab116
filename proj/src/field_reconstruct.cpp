#include "pwsim/field_reconstruct.hpp"

#include <cmath>

namespace pwsim {

namespace {

double trig(const RealMode& m, const Eigen::Vector3d& x) {
    const double phase = m.k.dot(x);
    return m.parity == ModeParity::cosine ? std::cos(phase) : std::sin(phase);
}

// d(trig)/d(phase) direction for the curl: cos -> -sin, sin -> +cos.
double trig_prime(const RealMode& m, const Eigen::Vector3d& x) {
    const double phase = m.k.dot(x);
    return m.parity == ModeParity::cosine ? -std::sin(phase) : std::cos(phase);
}

void check_size(std::span<const double> q, const ModeBasis& modes) {
    if (q.size() != modes.size())
        throw Error("field reconstruction: coordinate count does not match mode count");
}

}  // namespace

std::vector<FieldSample> reconstruct_A(std::span<const double> q, const ModeBasis& modes,
                                       std::span<const Eigen::Vector3d> points) {
    check_size(q, modes);
    std::vector<FieldSample> out(points.size());
    for (std::size_t p = 0; p < points.size(); ++p) {
        out[p].x = points[p];
        Eigen::Vector3d acc = Eigen::Vector3d::Zero();
        for (std::size_t j = 0; j < modes.size(); ++j) {
            const RealMode& m = modes.modes[j];
            acc += m.amplitude * q[j] * trig(m, points[p]) * m.epsilon;
        }
        out[p].A = acc;
    }
    return out;
}

std::vector<FieldSample> reconstruct_B(std::span<const double> q, const ModeBasis& modes,
                                       std::span<const Eigen::Vector3d> points) {
    check_size(q, modes);
    std::vector<FieldSample> out(points.size());
    for (std::size_t p = 0; p < points.size(); ++p) {
        out[p].x = points[p];
        Eigen::Vector3d acc = Eigen::Vector3d::Zero();
        for (std::size_t j = 0; j < modes.size(); ++j) {
            const RealMode& m = modes.modes[j];
            acc += m.amplitude * q[j] * trig_prime(m, points[p]) * m.k.cross(m.epsilon);
        }
        out[p].B = acc;
    }
    return out;
}

std::vector<double> mode_velocities(const Trajectory& trajectory, double t,
                                    bool* boundary_degraded) {
    const std::size_t n = trajectory.times.size();
    if (n < 2) throw Error("mode_velocities: trajectory needs at least two samples");
    // Locate the stored sample nearest t.
    std::size_t c = 0;
    double best = std::abs(trajectory.times[0] - t);
    for (std::size_t i = 1; i < n; ++i) {
        const double d = std::abs(trajectory.times[i] - t);
        if (d < best) {
            best = d;
            c = i;
        }
    }
    const std::size_t dims = trajectory.points[0].size();
    std::vector<double> qdot(dims, 0.0);
    bool degraded = false;
    std::size_t lo, hi;
    if (c == 0) {
        lo = 0;
        hi = 1;
        degraded = true;
    } else if (c + 1 == n) {
        lo = n - 2;
        hi = n - 1;
        degraded = true;
    } else {
        lo = c - 1;
        hi = c + 1;
    }
    const double dt = trajectory.times[hi] - trajectory.times[lo];
    if (!(dt > 0.0)) throw Error("mode_velocities: degenerate time samples");
    for (std::size_t a = 0; a < dims; ++a)
        qdot[a] = (trajectory.points[hi][a] - trajectory.points[lo][a]) / dt;
    if (boundary_degraded) *boundary_degraded = degraded;
    return qdot;
}

std::vector<FieldSample> reconstruct_E(const Trajectory& trajectory, const ModeBasis& modes,
                                       std::span<const Eigen::Vector3d> points, double t) {
    bool degraded = false;
    const std::vector<double> qdot = mode_velocities(trajectory, t, &degraded);
    if (qdot.size() != modes.size())
        throw Error("reconstruct_E: trajectory dimension does not match mode count");
    std::vector<FieldSample> out(points.size());
    for (std::size_t p = 0; p < points.size(); ++p) {
        out[p].x = points[p];
        out[p].boundary_degraded = degraded;
        Eigen::Vector3d acc = Eigen::Vector3d::Zero();
        for (std::size_t j = 0; j < modes.size(); ++j) {
            const RealMode& m = modes.modes[j];
            acc -= m.amplitude * qdot[j] * trig(m, points[p]) * m.epsilon;
        }
        out[p].E = acc;
    }
    return out;
}

std::vector<FieldSample> reconstruct_fields(std::span<const double> q, const ModeBasis& modes,
                                            std::span<const Eigen::Vector3d> points,
                                            const Trajectory* trajectory, double t) {
    std::vector<FieldSample> a = reconstruct_A(q, modes, points);
    std::vector<FieldSample> b = reconstruct_B(q, modes, points);
    for (std::size_t p = 0; p < points.size(); ++p) a[p].B = b[p].B;
    if (trajectory) {
        std::vector<FieldSample> e = reconstruct_E(*trajectory, modes, points, t);
        for (std::size_t p = 0; p < points.size(); ++p) {
            a[p].E = e[p].E;
            a[p].boundary_degraded = e[p].boundary_degraded;
        }
    }
    return a;
}

double ehrenfest_residual(std::span<const LabeledWavefunction> history,
                          const HamiltonianSpec& hamiltonian, const ModeBasis& modes,
                          std::span<const Eigen::Vector3d> points, double t) {
    if (history.size() < 3) throw Error("ehrenfest_residual: need at least three snapshots");
    if (hamiltonian.grid.dims() != modes.size())
        throw Error("ehrenfest_residual: grid axes must match mode count");

    // Middle snapshot nearest t, with neighbors on both sides.
    std::size_t c = 1;
    double best = std::abs(history[1].time() - t);
    for (std::size_t i = 1; i + 1 < history.size(); ++i) {
        const double d = std::abs(history[i].time() - t);
        if (d < best) {
            best = d;
            c = i;
        }
    }
    const LabeledWavefunction& minus = history[c - 1];
    const LabeledWavefunction& mid = history[c];
    const LabeledWavefunction& plus = history[c + 1];
    const double dt = 0.5 * (plus.time() - minus.time());
    if (!(dt > 0.0)) throw Error("ehrenfest_residual: snapshots must be time-ordered");

    const std::size_t m = modes.size();
    std::vector<double> q_minus(m), q_plus(m), p_mid(m);
    SpectralWorkspace ws(hamiltonian.grid, hamiltonian.labels);
    for (std::size_t j = 0; j < m; ++j) {
        q_minus[j] = position_expectation(minus, j);
        q_plus[j] = position_expectation(plus, j);
        p_mid[j] = momentum_expectation(mid, j, ws);
    }

    double worst = 0.0;
    for (const Eigen::Vector3d& x : points) {
        Eigen::Vector3d residual = Eigen::Vector3d::Zero();
        for (std::size_t j = 0; j < m; ++j) {
            const RealMode& mode = modes.modes[j];
            const Eigen::Vector3d kxe = mode.k.cross(mode.epsilon);
            const double dq_dt = (q_plus[j] - q_minus[j]) / (2.0 * dt);
            // d<B>/dt from the mode-coordinate means.
            residual += mode.amplitude * dq_dt * trig_prime(mode, x) * kxe;
            // curl <E> with <E> = -<Pi> reconstruction: curl(-N p eps trig)
            residual -= mode.amplitude * p_mid[j] * trig_prime(mode, x) * kxe;
        }
        worst = std::max(worst, residual.cwiseAbs().maxCoeff());
    }
    return worst;
}

}  // namespace pwsim
