#include "pwsim/collapse.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pwsim/interp.hpp"

namespace pwsim {

namespace {
constexpr double kResidualTol = 1e-10;
constexpr double kAgreementEps = 1e-12;
constexpr double kAmbiguityFactor = 10.0;

double velocity_at(const VelocityField& v, const BeableConfiguration& q,
                   std::vector<double>& out) {
    InterpStencil s = make_stencil(v.grid, q);
    double mag2 = 0.0;
    for (std::size_t a = 0; a < v.grid.dims(); ++a) {
        out[a] = s.inside ? s.apply(v.components[a]) : 0.0;
        mag2 += out[a] * out[a];
    }
    return std::sqrt(mag2);
}
}  // namespace

std::vector<DensityField> BranchDecomposition::branch_densities() const {
    std::vector<DensityField> out;
    out.reserve(branches.size());
    for (const LabeledWavefunction& b : branches) out.push_back(beable_density(b));
    return out;
}

BranchDecomposition BranchDecomposition::build(const LabeledWavefunction& psi,
                                               std::vector<LabeledWavefunction> branches) {
    if (branches.empty()) throw Error("branch decomposition: need at least one branch");
    LabeledWavefunction sum = branches[0];
    for (std::size_t b = 1; b < branches.size(); ++b)
        sum = combine(sum, branches[b], Complex{1.0, 0.0}, Complex{1.0, 0.0});
    const LabeledWavefunction diff = combine(psi, sum, Complex{1.0, 0.0}, Complex{-1.0, 0.0});
    BranchDecomposition d;
    d.residual = std::sqrt(diff.squared_norm());
    if (d.residual >= kResidualTol) {
        std::ostringstream os;
        os << "branch decomposition: residual " << d.residual << " exceeds " << kResidualTol;
        throw Error(os.str());
    }
    double weight_sum = 0.0;
    for (const LabeledWavefunction& b : branches) {
        d.weights.push_back(b.squared_norm());
        weight_sum += d.weights.back();
    }
    d.cross_terms = psi.squared_norm() - weight_sum;
    d.branches = std::move(branches);
    return d;
}

double branch_overlap(const LabeledWavefunction& a, const LabeledWavefunction& b) {
    if (a.grid() != b.grid()) throw Error("branch_overlap: grid mismatch");
    const std::size_t n = a.grid().size();
    std::vector<double> abs_a(n, 0.0), abs_b(n, 0.0);
    for (std::size_t f = 0; f < a.labels(); ++f) {
        const auto comp = a.label_component(f);
        for (std::size_t i = 0; i < n; ++i) abs_a[i] += std::abs(comp[i]);
    }
    for (std::size_t f = 0; f < b.labels(); ++f) {
        const auto comp = b.label_component(f);
        for (std::size_t i = 0; i < n; ++i) abs_b[i] += std::abs(comp[i]);
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += abs_a[i] * abs_b[i];
    acc *= a.grid().cell_volume();
    const double norms = std::sqrt(a.squared_norm() * b.squared_norm());
    if (!(norms > 0.0)) throw Error("branch_overlap: zero-norm input");
    return acc / norms;
}

double density_overlap(const LabeledWavefunction& a, const LabeledWavefunction& b) {
    if (a.grid() != b.grid()) throw Error("density_overlap: grid mismatch");
    const DensityField ra = beable_density(a);
    const DensityField rb = beable_density(b);
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < ra.values.size(); ++i) {
        dot += ra.values[i] * rb.values[i];
        na += ra.values[i] * ra.values[i];
        nb += rb.values[i] * rb.values[i];
    }
    if (!(na > 0.0) || !(nb > 0.0)) throw Error("density_overlap: zero-norm input");
    return dot / std::sqrt(na * nb);
}

double collapse_probability(const LabeledWavefunction& branch, const LabeledWavefunction& psi) {
    const double w = branch.squared_norm();
    if (!(w > 0.0)) throw Error("collapse_probability: zero-norm branch");
    return std::norm(inner_product(branch, psi)) / w;
}

Classification classify_point(const BeableConfiguration& q,
                              std::span<const DensityField> branch_densities) {
    if (branch_densities.empty()) throw Error("classify: no branches");
    double floor = 0.0;
    for (const DensityField& rho : branch_densities)
        floor = std::max(floor, rho.max_value());
    floor *= kNodeEpsilonRelative;

    std::size_t best = 0;
    double best_val = -1.0, second_val = -1.0;
    for (std::size_t b = 0; b < branch_densities.size(); ++b) {
        const double val = interpolate_density(branch_densities[b], q);
        if (val > best_val) {
            second_val = best_val;
            best_val = val;
            best = b;
        } else {
            second_val = std::max(second_val, val);
        }
    }
    Classification c;
    c.index = best;
    if (best_val < floor || floor == 0.0) {
        c.unclassifiable = true;
        return c;
    }
    if (branch_densities.size() > 1 && second_val > 0.0 &&
        best_val < kAmbiguityFactor * second_val)
        c.ambiguous = true;
    return c;
}

Classification classify_trajectory(const BeableConfiguration& q, const BranchDecomposition& d) {
    const std::vector<DensityField> densities = d.branch_densities();
    return classify_point(q, densities);
}

namespace {
// Max pairwise overlaps over the branch list.
void pairwise_overlaps(const std::vector<LabeledWavefunction>& branches, double& density,
                       double& amplitude) {
    density = 0.0;
    amplitude = 0.0;
    for (std::size_t i = 0; i < branches.size(); ++i) {
        for (std::size_t j = i + 1; j < branches.size(); ++j) {
            density = std::max(density, density_overlap(branches[i], branches[j]));
            amplitude = std::max(amplitude, branch_overlap(branches[i], branches[j]));
        }
    }
}

BeableConfiguration trajectory_point_at(const Trajectory& traj, double t) {
    // Nearest stored sample; histories are stored on the same stride.
    std::size_t best = 0;
    double best_dt = std::abs(traj.times[0] - t);
    for (std::size_t i = 1; i < traj.times.size(); ++i) {
        const double d = std::abs(traj.times[i] - t);
        if (d < best_dt) {
            best_dt = d;
            best = i;
        }
    }
    return traj.points[best];
}
}  // namespace

CollapseReport detect_effective_collapse(const Trajectory& trajectory,
                                         std::span<const BranchSnapshot> history, double threshold,
                                         const HamiltonianSpec& hamiltonian,
                                         std::size_t trajectory_id) {
    if (history.empty()) throw Error("detect_effective_collapse: empty history");
    if (trajectory.times.empty()) throw Error("detect_effective_collapse: empty trajectory");

    CollapseReport report;
    report.trajectory_id = trajectory_id;

    const bool single_branch = history.front().branches.size() < 2;
    for (const BranchSnapshot& snap : history) {
        report.overlap_times.push_back(snap.time);
        if (single_branch) {
            report.overlap_history.push_back(0.0);
            report.amplitude_overlap_history.push_back(0.0);
            continue;
        }
        double rho_ov = 0.0, amp_ov = 0.0;
        pairwise_overlaps(snap.branches, rho_ov, amp_ov);
        report.overlap_history.push_back(rho_ov);
        report.amplitude_overlap_history.push_back(amp_ov);
    }

    if (single_branch) {
        report.branch_index = 0;
        return report;  // no collapse event; agreement trivially 0
    }

    // First index from which the density overlap stays below threshold.
    std::optional<std::size_t> onset;
    for (std::size_t i = history.size(); i-- > 0;) {
        if (report.overlap_history[i] < threshold)
            onset = i;
        else
            break;
    }
    if (!onset) return report;  // no collapse: a valid outcome

    report.collapse_time = history[*onset].time;

    // Classify at collapse onset.
    const BeableConfiguration q0 = trajectory_point_at(trajectory, *report.collapse_time);
    std::vector<DensityField> densities;
    for (const LabeledWavefunction& b : history[*onset].branches)
        densities.push_back(beable_density(b));
    const Classification cls = classify_point(q0, densities);
    report.ambiguous = cls.ambiguous;
    report.unclassifiable = cls.unclassifiable;
    if (cls.unclassifiable) return report;
    report.branch_index = cls.index;

    // Post-collapse velocity agreement between the full state and the branch.
    SpectralWorkspace ws(hamiltonian.grid, hamiltonian.labels);
    const std::size_t d = hamiltonian.grid.dims();
    std::vector<double> v_tot(d), v_br(d);
    double worst = 0.0;
    for (std::size_t i = *onset; i < history.size(); ++i) {
        const BranchSnapshot& snap = history[i];
        LabeledWavefunction total = snap.branches[0];
        for (std::size_t b = 1; b < snap.branches.size(); ++b)
            total = combine(total, snap.branches[b], Complex{1.0, 0.0}, Complex{1.0, 0.0});
        total = total.with_time(snap.time);
        const LabeledWavefunction branch = snap.branches[*report.branch_index].with_time(snap.time);

        const VelocityField vf_tot = velocity_field(beable_density(total),
                                                    current(total, hamiltonian, ws));
        const VelocityField vf_br = velocity_field(beable_density(branch),
                                                   current(branch, hamiltonian, ws));
        const BeableConfiguration q = trajectory_point_at(trajectory, snap.time);
        velocity_at(vf_tot, q, v_tot);
        const double mag_br = velocity_at(vf_br, q, v_br);
        double diff2 = 0.0;
        for (std::size_t a = 0; a < d; ++a) diff2 += (v_tot[a] - v_br[a]) * (v_tot[a] - v_br[a]);
        worst = std::max(worst, std::sqrt(diff2) / (mag_br + kAgreementEps));
    }
    report.velocity_agreement_error = worst;
    return report;
}

MeasurementScenario build_measurement_scenario(std::size_t levels,
                                               const ConfigurationGrid& pointer_grid,
                                               double coupling, double duration,
                                               std::span<const Complex> level_amplitudes,
                                               double pointer_width, double pointer_center,
                                               double pointer_mass) {
    if (pointer_grid.dims() != 1) throw Error("measurement: pointer grid must be 1-D");
    if (levels == 0 || levels > 4) throw Error("measurement: levels must be in 1..4");
    if (level_amplitudes.size() != levels)
        throw Error("measurement: need one amplitude per level");
    if (!(pointer_width > 0.0)) throw Error("measurement: pointer width must be positive");

    MeasurementScenario scenario;
    HamiltonianSpec h;
    h.grid = pointer_grid;
    h.labels = levels;
    h.kinetic_metric = {1.0 / pointer_mass};
    h.momentum_coupling.resize(levels);
    for (std::size_t f = 0; f < levels; ++f)
        h.momentum_coupling[f] = {coupling * static_cast<double>(f + 1)};
    h.validate();
    scenario.hamiltonian = std::move(h);

    if (levels > 1 && std::abs(coupling) * duration < 5.0 * pointer_width) {
        std::ostringstream os;
        os << "measurement: coupling*duration=" << std::abs(coupling) * duration
           << " separates adjacent pointer packets by less than 5 widths ("
           << 5.0 * pointer_width << ")";
        scenario.warnings.push_back(os.str());
    }

    GaussianSpec packet;
    packet.centers = {pointer_center};
    packet.widths = {pointer_width};
    std::vector<Complex> weights(level_amplitudes.begin(), level_amplitudes.end());
    scenario.initial_state = normalize(gaussian_packet(pointer_grid, packet, weights));

    for (std::size_t f = 0; f < levels; ++f) {
        // Projection onto label f: zero every other label component.
        std::vector<Complex> amps(scenario.initial_state.amplitudes().begin(),
                                  scenario.initial_state.amplitudes().end());
        const std::size_t n = pointer_grid.size();
        for (std::size_t g = 0; g < levels; ++g) {
            if (g == f) continue;
            std::fill(amps.begin() + static_cast<long>(g * n),
                      amps.begin() + static_cast<long>((g + 1) * n), Complex{});
        }
        scenario.branch_template.emplace_back(pointer_grid, levels, std::move(amps), 0.0);
    }
    return scenario;
}

}  // namespace pwsim
