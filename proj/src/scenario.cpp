#include "pwsim/scenario.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pwsim/checkpoint.hpp"
#include "pwsim/ensemble.hpp"
#include "pwsim/version.hpp"

namespace pwsim {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kNormDriftBound = 1e-10;  // per 10^3 steps
constexpr double kEnergyDriftBound = 1e-6;
constexpr std::size_t kMaxCollapseReports = 8;

std::string now_iso() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("output: cannot open " + path.string());
    os << content;
    if (!os) throw Error("output: write failed for " + path.string());
}

std::vector<Complex> ladder_coupling(std::size_t labels, double strength) {
    std::vector<Complex> m(labels * labels, Complex{});
    for (std::size_t i = 0; i + 1 < labels; ++i) {
        m[i * labels + (i + 1)] = strength;
        m[(i + 1) * labels + i] = strength;
    }
    return m;
}

std::vector<LabeledWavefunction> label_projections(const LabeledWavefunction& psi) {
    const std::size_t L = psi.labels();
    const std::size_t n = psi.grid().size();
    std::vector<LabeledWavefunction> out;
    out.reserve(L);
    for (std::size_t f = 0; f < L; ++f) {
        std::vector<Complex> amps(psi.amplitudes().begin(), psi.amplitudes().end());
        for (std::size_t g = 0; g < L; ++g) {
            if (g == f) continue;
            std::fill(amps.begin() + static_cast<long>(g * n),
                      amps.begin() + static_cast<long>((g + 1) * n), Complex{});
        }
        out.emplace_back(psi.grid(), L, std::move(amps), psi.time());
    }
    return out;
}

std::vector<Eigen::Vector3d> sample_points(const FieldSampleAnalysis& fs_cfg) {
    std::vector<Eigen::Vector3d> pts;
    for (const auto& p : fs_cfg.points) pts.emplace_back(p[0], p[1], p[2]);
    if (pts.empty()) {
        pts.emplace_back(0.0, 0.0, 0.0);
        pts.emplace_back(0.2, 0.3, 0.5);
        pts.emplace_back(1.1, -0.4, 0.7);
        pts.emplace_back(-0.6, 0.9, 0.2);
    }
    return pts;
}

}  // namespace

ScenarioBuild build_scenario(const ScenarioConfig& c) {
    ScenarioBuild b;
    b.grid = make_grid(c.grid.axes, c.grid.boundary);

    const std::size_t labels = c.initial_state.label_amplitudes.size();
    const double duration = c.run.dt * static_cast<double>(c.run.steps);

    switch (c.kind) {
        case ScenarioKind::free_particle: {
            HamiltonianSpec h;
            h.grid = b.grid;
            h.labels = 1;
            h.kinetic_metric.assign(b.grid.dims(), 1.0 / c.free_particle.mass);
            h.validate();
            b.hamiltonian = std::move(h);
            break;
        }
        case ScenarioKind::pauli_spin: {
            const auto& p = c.pauli;
            b.hamiltonian = build_pauli_hamiltonian(
                b.grid, Vector3Field::uniform(p.a_field[0], p.a_field[1], p.a_field[2]), {},
                Vector3Field::uniform(p.b_field[0], p.b_field[1], p.b_field[2]), p.mu, p.charge,
                p.mass);
            break;
        }
        case ScenarioKind::free_field_modes:
        case ScenarioKind::coupled_qed_toy: {
            std::vector<Eigen::Vector3d> ks;
            for (const auto& k : c.modes.k_list) ks.emplace_back(k[0], k[1], k[2]);
            ModeBasis basis = build_mode_basis(ks);
            if (!c.modes.retain.empty()) basis = basis.subset(c.modes.retain);
            if (c.kind == ScenarioKind::free_field_modes) {
                b.hamiltonian = build_mode_field_hamiltonian(b.grid, basis);
            } else {
                std::vector<ModeCoupling> couplings;
                if (c.coupled.coupling_strength != 0.0)
                    couplings.push_back(ModeCoupling{
                        c.coupled.coupled_mode, ladder_coupling(labels, c.coupled.coupling_strength)});
                b.hamiltonian = build_coupled_hamiltonian(b.grid, basis, labels, couplings,
                                                          c.coupled.level_energies);
            }
            b.modes = std::move(basis);
            break;
        }
        case ScenarioKind::measurement: {
            MeasurementScenario m = build_measurement_scenario(
                c.measurement.levels, b.grid, c.measurement.coupling, duration,
                c.initial_state.label_amplitudes, c.initial_state.widths.at(0),
                c.initial_state.centers.at(0), c.measurement.pointer_mass);
            b.hamiltonian = std::move(m.hamiltonian);
            b.initial_state = std::move(m.initial_state);
            b.branches = std::move(m.branch_template);
            b.warnings = std::move(m.warnings);
            return b;
        }
    }

    GaussianSpec packet;
    packet.centers = c.initial_state.centers;
    packet.momenta = c.initial_state.momenta;
    if (c.initial_state.kind == "coherent") {
        // Ground-state width of each mode oscillator; centers act as coherent
        // displacements.
        packet.widths.resize(b.grid.dims());
        for (std::size_t a = 0; a < b.grid.dims(); ++a) {
            const double omega = b.modes->modes[a].frequency;
            packet.widths[a] = 1.0 / std::sqrt(2.0 * omega);
        }
    } else {
        packet.widths = c.initial_state.widths;
    }
    b.initial_state =
        normalize(gaussian_packet(b.grid, packet, c.initial_state.label_amplitudes));

    if (c.collapse.enabled) {
        if (b.initial_state.labels() >= 2)
            b.branches = label_projections(b.initial_state);
        else
            b.warnings.push_back("collapse analysis needs >= 2 labels; skipped");
    }
    return b;
}

namespace {

struct CoreResult {
    EnsembleRun run;
    std::vector<double> snapshot_times;
    std::vector<double> norms;
    std::vector<double> energies;
    std::vector<BranchSnapshot> branch_history;
    std::vector<LabeledWavefunction> ehrenfest_snaps;
    std::vector<std::string> warnings;
    std::optional<fs::path> checkpoint_file;
};

// Runs evolution + trajectories from `start_step` to cfg.run.steps, splitting
// at the configured checkpoint step.
CoreResult execute_core(const ScenarioConfig& cfg, const ScenarioBuild& build,
                        const std::vector<BeableConfiguration>& starts,
                        const LabeledWavefunction& psi_start, std::size_t start_step,
                        const fs::path& out_dir, int threads, const std::string& rng_state) {
    CoreResult core;
    const std::size_t total_steps = cfg.run.steps;
    const std::size_t stride = cfg.run.snapshot_stride;

    std::vector<std::unique_ptr<SplitStepEvolver>> branch_evolvers;
    std::vector<LabeledWavefunction> branch_start = build.branches;
    if (start_step > 0 && !build.branches.empty()) {
        // Branches re-projected from the resumed state; exact for
        // label-diagonal dynamics (measurement), approximate otherwise.
        branch_start = label_projections(psi_start);
        if (cfg.kind != ScenarioKind::measurement)
            core.warnings.push_back(
                "resume: branch states re-projected from the total state; label couplings make "
                "this approximate");
    }
    for (const LabeledWavefunction& br : branch_start) {
        branch_evolvers.push_back(std::make_unique<SplitStepEvolver>(build.hamiltonian, cfg.run.dt));
        branch_evolvers.back()->load(br);
    }

    const std::size_t ehrenfest_center =
        cfg.ehrenfest.enabled
            ? static_cast<std::size_t>(std::llround(cfg.ehrenfest.time / cfg.run.dt))
            : 0;

    auto on_step_global = [&](std::size_t global, const LabeledWavefunction& psi) {
        if (global % stride == 0 || global == total_steps) {
            core.snapshot_times.push_back(psi.time());
            core.norms.push_back(psi.squared_norm());
            core.energies.push_back(energy_expectation(psi, build.hamiltonian));
            if (!branch_evolvers.empty()) {
                BranchSnapshot snap;
                snap.time = psi.time();
                for (auto& ev : branch_evolvers) snap.branches.push_back(ev->snapshot());
                core.branch_history.push_back(std::move(snap));
            }
        }
        if (cfg.ehrenfest.enabled &&
            (global + 4 == ehrenfest_center || global == ehrenfest_center ||
             global == ehrenfest_center + 4))
            core.ehrenfest_snaps.push_back(psi);
    };

    std::vector<std::size_t> boundaries;
    if (cfg.run.checkpoint_step && *cfg.run.checkpoint_step > start_step &&
        *cfg.run.checkpoint_step < total_steps)
        boundaries.push_back(*cfg.run.checkpoint_step);
    boundaries.push_back(total_steps);

    LabeledWavefunction psi = psi_start;
    std::vector<BeableConfiguration> current = starts;
    std::size_t done = start_step;
    bool first_segment = true;

    for (std::size_t boundary : boundaries) {
        const std::size_t seg_steps = boundary - done;
        PropagateOptions opt;
        opt.store_stride = stride;
        opt.threads = threads;
        opt.velocity_scale = cfg.equivariance.velocity_scale;
        const std::size_t offset = done;
        const bool include_first = first_segment;
        opt.on_step = [&, offset, include_first](std::size_t s, const LabeledWavefunction& p) {
            if (s == 0 && !include_first) return;  // junction already recorded
            if (s > 0)
                for (auto& ev : branch_evolvers) ev->step();
            on_step_global(offset + s, p);
        };

        EnsembleRun seg = propagate_ensemble(current, psi, build.hamiltonian, cfg.run.dt,
                                             seg_steps, opt);
        if (first_segment) {
            core.run = std::move(seg);
        } else {
            // Merge: append stored samples past the junction.
            for (std::size_t i = 0; i < core.run.trajectories.size(); ++i) {
                Trajectory& dst = core.run.trajectories[i];
                const Trajectory& src = seg.trajectories[i];
                for (std::size_t s = 1; s < src.times.size(); ++s) {
                    dst.times.push_back(src.times[s]);
                    dst.points.push_back(src.points[s]);
                }
            }
            core.run.final_state = seg.final_state;
            core.run.max_speed = std::max(core.run.max_speed, seg.max_speed);
            core.run.aborted = seg.aborted;
            for (const std::string& w : seg.warnings) core.run.warnings.push_back(w);
        }

        psi = core.run.final_state;
        current.clear();
        for (const Trajectory& tr : core.run.trajectories) current.push_back(tr.points.back());
        done = boundary;
        first_segment = false;

        if (cfg.run.checkpoint_step && boundary == *cfg.run.checkpoint_step) {
            Checkpoint cp;
            cp.config_json = canonical_config_text(cfg);
            cp.step = boundary;
            cp.state = psi;
            cp.ensemble = current;
            cp.rng_state = rng_state;
            const fs::path path = out_dir / "checkpoint.pwsim";
            save_checkpoint(cp, path);
            core.checkpoint_file = path;
        }
    }
    for (const std::string& w : core.run.warnings) core.warnings.push_back(w);
    return core;
}

std::string trajectories_csv(const EnsembleRun& run, std::size_t dims) {
    std::ostringstream os;
    os << "id,t";
    for (std::size_t a = 0; a < dims; ++a) os << ",coord_" << a;
    os << "\n";
    for (std::size_t i = 0; i < run.trajectories.size(); ++i) {
        const Trajectory& tr = run.trajectories[i];
        for (std::size_t s = 0; s < tr.times.size(); ++s) {
            os << i << "," << fmt(tr.times[s]);
            for (std::size_t a = 0; a < dims; ++a) os << "," << fmt(tr.points[s][a]);
            os << "\n";
        }
    }
    return os.str();
}

std::string fields_csv(const Trajectory& tr, const ModeBasis& modes,
                       const std::vector<Eigen::Vector3d>& points) {
    std::ostringstream os;
    os << "t,x,y,z,Ax,Ay,Az,Bx,By,Bz,Ex,Ey,Ez\n";
    for (std::size_t s = 0; s < tr.times.size(); ++s) {
        const double t = tr.times[s];
        const auto samples = reconstruct_fields(tr.points[s].coords, modes, points, &tr, t);
        for (const FieldSample& fsm : samples) {
            os << fmt(t);
            for (int c = 0; c < 3; ++c) os << "," << fmt(fsm.x[c]);
            for (int c = 0; c < 3; ++c) os << "," << fmt(fsm.A[c]);
            for (int c = 0; c < 3; ++c) os << "," << fmt(fsm.B[c]);
            const Eigen::Vector3d e = fsm.E.value_or(Eigen::Vector3d::Zero());
            for (int c = 0; c < 3; ++c) os << "," << fmt(e[c]);
            os << "\n";
        }
    }
    return os.str();
}

RunResult finalize_run(const ScenarioConfig& cfg, const ScenarioBuild& build, CoreResult core,
                       const EnsembleSample* sample, const fs::path& out_dir,
                       const std::string& started_at, std::size_t start_step) {
    json manifest;
    json metrics;
    json assertions;
    std::vector<std::string> emitted;
    RunStatus status = RunStatus::ok;

    auto fail_assert = [&](const char* name, bool ok) {
        assertions[name] = ok;
        if (!ok) status = RunStatus::assertion_failed;
    };

    // Unitarity and energy drift.
    double norm_drift = 0.0, energy_drift = 0.0;
    if (!core.norms.empty()) {
        for (double n : core.norms) norm_drift = std::max(norm_drift, std::abs(n - core.norms[0]));
        const double e0 = core.energies[0];
        for (double e : core.energies)
            energy_drift = std::max(energy_drift, std::abs(e - e0) / std::max(std::abs(e0), 1e-30));
    }
    const double steps_run = static_cast<double>(cfg.run.steps - start_step);
    const double norm_drift_per_1000 =
        steps_run > 1000.0 ? norm_drift * (1000.0 / steps_run) : norm_drift;
    metrics["norm_drift_per_1000_steps"] = norm_drift_per_1000;
    metrics["energy_drift_relative"] = energy_drift;
    fail_assert("unitarity", norm_drift_per_1000 < kNormDriftBound);
    fail_assert("energy_conservation", energy_drift < kEnergyDriftBound);

    metrics["max_speed"] = core.run.max_speed;
    metrics["aborted_trajectories"] = core.run.aborted.size();
    metrics["final_time"] = core.run.final_state.time();

    // Live trajectory endpoints for the statistical analyses.
    std::vector<BeableConfiguration> finals;
    for (std::size_t i = 0; i < core.run.trajectories.size(); ++i) {
        bool aborted = false;
        for (std::size_t a : core.run.aborted) aborted |= (a == i);
        if (!aborted) finals.push_back(core.run.trajectories[i].points.back());
    }

    if (cfg.equivariance.enabled && !finals.empty()) {
        const FitReport fit =
            equivariance_test(finals, core.run.final_state, cfg.equivariance.ks_critical);
        metrics["ks"] = fit.ks;
        metrics["ks_threshold"] = fit.threshold;
        metrics["ks_pass"] = fit.pass;
        json fr;
        fr["ks"] = fit.ks;
        fr["samples"] = fit.samples;
        fr["threshold"] = fit.threshold;
        fr["pass"] = fit.pass;
        write_text(out_dir / "fit_report.json", fr.dump(2) + "\n");
        emitted.push_back("fit_report.json");
        const bool expected_pass = cfg.equivariance.expect == "pass";
        fail_assert("equivariance", fit.pass == expected_pass);
    }

    std::optional<BranchDecomposition> decomposition;
    if (!core.branch_history.empty()) {
        try {
            decomposition = BranchDecomposition::build(core.run.final_state,
                                                       core.branch_history.back().branches);
        } catch (const Error& e) {
            core.warnings.push_back(std::string("branch decomposition: ") + e.what());
        }
    }

    if (cfg.born.enabled && decomposition && !finals.empty()) {
        const BornReport born = born_fraction(finals, *decomposition);
        metrics["born_fractions"] = born.fractions;
        metrics["born_std_errors"] = born.std_errors;
        metrics["born_unclassifiable"] = born.unclassifiable;
        json br;
        br["counts"] = born.counts;
        br["fractions"] = born.fractions;
        br["std_errors"] = born.std_errors;
        br["ambiguous"] = born.ambiguous;
        br["unclassifiable"] = born.unclassifiable;
        br["total"] = born.total;
        br["branch_weights"] = decomposition->weights;
        write_text(out_dir / "born_report.json", br.dump(2) + "\n");
        emitted.push_back("born_report.json");
        if (!cfg.born.expected_fractions.empty()) {
            bool ok = true;
            const double n = static_cast<double>(born.total);
            for (std::size_t b = 0; b < cfg.born.expected_fractions.size(); ++b) {
                const double p = cfg.born.expected_fractions[b];
                const double tol =
                    cfg.born.tolerance_sigmas * std::sqrt(std::max(p * (1.0 - p), 1e-12) / n);
                if (std::abs(born.fractions[b] - p) > tol) ok = false;
            }
            fail_assert("born_fractions", ok);
        }
    }

    if (cfg.collapse.enabled && !core.branch_history.empty() && !core.run.trajectories.empty()) {
        json creports = json::array();
        std::optional<double> collapse_time;
        double worst_agreement = 0.0;
        const std::size_t count = std::min(core.run.trajectories.size(), kMaxCollapseReports);
        json series;
        for (std::size_t i = 0; i < count; ++i) {
            const CollapseReport rep =
                detect_effective_collapse(core.run.trajectories[i], core.branch_history,
                                          cfg.collapse.threshold, build.hamiltonian, i);
            if (i == 0) {
                series["times"] = rep.overlap_times;
                series["density_overlap"] = rep.overlap_history;
                series["amplitude_overlap"] = rep.amplitude_overlap_history;
                collapse_time = rep.collapse_time;
            }
            json r;
            r["trajectory"] = rep.trajectory_id;
            if (rep.collapse_time) r["collapse_time"] = *rep.collapse_time;
            if (rep.branch_index) r["branch"] = *rep.branch_index;
            r["velocity_agreement_error"] = rep.velocity_agreement_error;
            r["ambiguous"] = rep.ambiguous;
            r["unclassifiable"] = rep.unclassifiable;
            creports.push_back(r);
            worst_agreement = std::max(worst_agreement, rep.velocity_agreement_error);
        }
        json cr;
        cr["threshold"] = cfg.collapse.threshold;
        cr["series"] = series;
        cr["reports"] = creports;
        write_text(out_dir / "collapse_report.json", cr.dump(2) + "\n");
        emitted.push_back("collapse_report.json");
        if (collapse_time) metrics["collapse_time"] = *collapse_time;
        metrics["velocity_agreement_error"] = worst_agreement;
    }

    if (cfg.ehrenfest.enabled) {
        if (core.ehrenfest_snaps.size() >= 3 && build.modes) {
            const auto pts = sample_points(cfg.field_samples);
            const double residual =
                ehrenfest_residual(core.ehrenfest_snaps, build.hamiltonian, *build.modes, pts,
                                   cfg.ehrenfest.time);
            metrics["ehrenfest_residual"] = residual;
        } else {
            core.warnings.push_back("ehrenfest: snapshot window not captured (resumed run?)");
        }
    }

    if (cfg.output.trajectories && !core.run.trajectories.empty()) {
        write_text(out_dir / "trajectories.csv",
                   trajectories_csv(core.run, build.grid.dims()));
        emitted.push_back("trajectories.csv");
    }
    if (cfg.output.fields && build.modes && !core.run.trajectories.empty()) {
        const std::size_t ti =
            std::min(cfg.field_samples.trajectory_index, core.run.trajectories.size() - 1);
        write_text(out_dir / "fields.csv",
                   fields_csv(core.run.trajectories[ti], *build.modes,
                              sample_points(cfg.field_samples)));
        emitted.push_back("fields.csv");
    }
    if (core.checkpoint_file) emitted.push_back(core.checkpoint_file->filename().string());

    if (sample && !sample->points.empty()) {
        metrics["ensemble_n"] = sample->points.size();
        metrics["ensemble_method"] =
            sample->method == SampleMethod::rejection ? "rejection" : "metropolis";
    }

    std::vector<std::string> warnings = build.warnings;
    for (const std::string& w : core.warnings) warnings.push_back(w);
    if (sample)
        for (const std::string& w : sample->warnings) warnings.push_back(w);

    manifest["name"] = cfg.name;
    manifest["scenario"] = to_string(cfg.kind);
    manifest["config_hash"] = config_hash(cfg);
    manifest["code_version"] = kVersion;
    manifest["started_at"] = started_at;
    manifest["finished_at"] = now_iso();
    manifest["seed"] = cfg.ensemble.seed;
    manifest["start_step"] = start_step;
    manifest["metrics"] = metrics;
    manifest["assertions"] = assertions;
    manifest["warnings"] = warnings;

    RunResult result;
    result.status = status;
    manifest["status"] = status == RunStatus::ok ? "ok" : "assertion_failed";
    manifest["emitted_files"] = emitted;
    result.manifest_json = manifest.dump(2) + "\n";
    result.manifest_path = out_dir / "manifest.json";
    write_text(result.manifest_path, result.manifest_json);
    return result;
}

RunResult failure_manifest(const ScenarioConfig& cfg, const fs::path& out_dir,
                           const std::string& started_at, const std::string& message,
                           RunStatus status) {
    json manifest;
    manifest["name"] = cfg.name;
    manifest["scenario"] = to_string(cfg.kind);
    manifest["config_hash"] = config_hash(cfg);
    manifest["code_version"] = kVersion;
    manifest["started_at"] = started_at;
    manifest["finished_at"] = now_iso();
    manifest["status"] = status == RunStatus::numeric_failure ? "numeric_failure" : "error";
    manifest["failure"] = message;
    manifest["emitted_files"] = json::array();

    RunResult result;
    result.status = status;
    result.manifest_json = manifest.dump(2) + "\n";
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    result.manifest_path = out_dir / "manifest.json";
    write_text(result.manifest_path, result.manifest_json);
    return result;
}

RunResult run_from(const ScenarioConfig& cfg, const LabeledWavefunction* resume_state,
                   const std::vector<BeableConfiguration>* resume_points,
                   std::size_t start_step, const std::string& resume_rng,
                   const RunOverrides& overrides) {
    const std::string started_at = now_iso();
    ScenarioConfig c = cfg;
    if (overrides.seed) c.ensemble.seed = *overrides.seed;
    const fs::path out_dir = overrides.out_dir.value_or(fs::path(c.output.directory));
    const int threads = overrides.threads.value_or(1);

    ScenarioBuild build;
    try {
        build = build_scenario(c);
    } catch (const Error& e) {
        RunResult r = failure_manifest(c, out_dir, started_at, e.what(), RunStatus::config_error);
        return r;
    }

    try {
        fs::create_directories(out_dir);

        EnsembleSample sample;
        std::string rng_state = resume_rng;
        if (resume_state) {
            sample.points = *resume_points;
            sample.seed = c.ensemble.seed;
        } else if (c.ensemble.n > 0) {
            const DensityField rho0 = beable_density(build.initial_state);
            if (c.ensemble.method == "rejection")
                sample = sample_equilibrium(rho0, c.ensemble.n, c.ensemble.seed,
                                            SampleMethod::rejection);
            else if (c.ensemble.method == "metropolis")
                sample = sample_equilibrium(rho0, c.ensemble.n, c.ensemble.seed,
                                            SampleMethod::metropolis);
            else
                sample = sample_equilibrium(rho0, c.ensemble.n, c.ensemble.seed);
            RandomStream rng(c.ensemble.seed);
            rng_state = rng.serialize();
        }

        const LabeledWavefunction& psi0 = resume_state ? *resume_state : build.initial_state;
        CoreResult core = execute_core(c, build, sample.points, psi0, start_step, out_dir,
                                       threads, rng_state);
        return finalize_run(c, build, std::move(core), &sample, out_dir, started_at, start_step);
    } catch (const Error& e) {
        return failure_manifest(c, out_dir, started_at, e.what(), RunStatus::numeric_failure);
    }
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& config, const RunOverrides& overrides) {
    return run_from(config, nullptr, nullptr, 0, std::string(), overrides);
}

RunResult resume_scenario(const fs::path& checkpoint_path, const RunOverrides& overrides) {
    const Checkpoint cp = load_checkpoint(checkpoint_path);
    const ParseResult parsed = parse_config_text(cp.config_json);
    if (!parsed.ok()) {
        throw Error("resume: embedded config invalid: " +
                    (parsed.errors.empty() ? "unknown" : parsed.errors.front()));
    }
    return run_from(*parsed.config, &cp.state, &cp.ensemble, cp.step, cp.rng_state, overrides);
}

std::string summarize_manifest(const fs::path& manifest_path) {
    std::ifstream is(manifest_path);
    if (!is) throw Error("report: cannot open " + manifest_path.string());
    json m = json::parse(is, nullptr, false);
    if (m.is_discarded()) throw Error("report: malformed manifest");

    std::ostringstream os;
    os << "scenario: " << m.value("name", std::string("?")) << " ("
       << m.value("scenario", std::string("?")) << ")\n";
    os << "status:   " << m.value("status", std::string("?")) << "\n";
    os << "version:  " << m.value("code_version", std::string("?"))
       << "  config_hash: " << m.value("config_hash", std::string("?")) << "\n";
    if (m.contains("metrics")) {
        os << "metrics:\n";
        for (auto it = m["metrics"].begin(); it != m["metrics"].end(); ++it)
            os << "  " << it.key() << ": " << it.value().dump() << "\n";
    }
    if (m.contains("assertions")) {
        os << "assertions:\n";
        for (auto it = m["assertions"].begin(); it != m["assertions"].end(); ++it)
            os << "  " << it.key() << ": " << (it.value().get<bool>() ? "pass" : "FAIL") << "\n";
    }
    if (m.contains("warnings") && !m["warnings"].empty()) {
        os << "warnings:\n";
        for (const auto& w : m["warnings"]) os << "  " << w.get<std::string>() << "\n";
    }
    return os.str();
}

}  // namespace pwsim
