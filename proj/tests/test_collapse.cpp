#include <doctest.h>

#include <cmath>
#include <numbers>
#include <pwsim/collapse.hpp>
#include <pwsim/ensemble.hpp>

using namespace pwsim;

namespace {

LabeledWavefunction packet(const ConfigurationGrid& g, double center, double width,
                           double momentum = 0.0, double weight = 1.0) {
    GaussianSpec spec;
    spec.centers = {center};
    spec.widths = {width};
    spec.momenta = {momentum};
    LabeledWavefunction psi = normalize(gaussian_packet(g, spec, {Complex{1.0, 0.0}}));
    return combine(psi, psi, Complex{weight, 0.0}, Complex{});
}

// Two-label state holding phi1 on label 0 and phi2 on label 1.
LabeledWavefunction on_labels(const LabeledWavefunction& phi1, const LabeledWavefunction& phi2) {
    const std::size_t n = phi1.grid().size();
    std::vector<Complex> amps(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        amps[i] = phi1.at(0, i);
        amps[n + i] = phi2.at(0, i);
    }
    return LabeledWavefunction(phi1.grid(), 2, amps);
}

}  // namespace

TEST_CASE("branch_overlap: identity, disjoint supports, label-only orthogonality") {
    const ConfigurationGrid g = make_grid({{-32.0, 32.0, 512}});
    const LabeledWavefunction psi = packet(g, 0.0, 1.0);
    CHECK(branch_overlap(psi, psi) == doctest::Approx(1.0).epsilon(1e-12));

    // Identical two-label states saturate at >= 1.
    const LabeledWavefunction two = on_labels(packet(g, 0.0, 1.0, 0.0, 1.0 / std::numbers::sqrt2),
                                              packet(g, 0.0, 1.0, 0.0, 1.0 / std::numbers::sqrt2));
    CHECK(branch_overlap(two, two) >= 1.0 - 1e-12);

    // Packets 20 widths apart do not overlap on the grid.
    const LabeledWavefunction left = packet(g, -10.0, 1.0);
    const LabeledWavefunction right = packet(g, 10.0, 1.0);
    CHECK(branch_overlap(left, right) < 1e-12);

    // Orthogonal in the label index only: NOT an effective-collapse split.
    const LabeledWavefunction phi = packet(g, 0.0, 1.0);
    const LabeledWavefunction zero = LabeledWavefunction::zero(g, 1);
    const LabeledWavefunction b1 = on_labels(phi, zero);
    const LabeledWavefunction b2 = on_labels(zero, phi);
    const double label_only = branch_overlap(b1, b2);
    CHECK(label_only > 0.9);
    CHECK(label_only == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("density_overlap: disjoint, identical and sliding top-hats") {
    const ConfigurationGrid g = make_grid({{-32.0, 32.0, 1024}});
    CHECK(density_overlap(packet(g, -10.0, 1.0), packet(g, 10.0, 1.0)) < 1e-14);
    CHECK(density_overlap(packet(g, 0.0, 1.3), packet(g, 0.0, 1.3)) ==
          doctest::Approx(1.0).epsilon(1e-12));

    // Top-hat densities of width w at separation delta overlap as 1 - delta/w.
    const double w = 8.0;
    auto top_hat = [&](double center) {
        std::vector<Complex> amps(g.size(), Complex{});
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double x = g.coordinate(0, i);
            if (x >= center - w / 2 && x < center + w / 2) amps[i] = 1.0;
        }
        return normalize(LabeledWavefunction(g, 1, amps));
    };
    double previous = 1.0;
    for (double delta : {1.0, 2.0, 4.0, 6.0}) {
        const double ov = density_overlap(top_hat(0.0), top_hat(delta));
        CHECK(ov == doctest::Approx(1.0 - delta / w).epsilon(0.02));
        CHECK(ov < previous);
        CHECK(ov > 0.0);
        previous = ov;
    }
}

TEST_CASE("collapse_probability: disjoint weights, identity, orthogonality") {
    const ConfigurationGrid g = make_grid({{-32.0, 32.0, 512}});
    const LabeledWavefunction b1 = packet(g, -10.0, 1.0, 0.0, std::sqrt(0.3));
    const LabeledWavefunction b2 = packet(g, 10.0, 1.0, 0.0, std::sqrt(0.7));
    const LabeledWavefunction psi = combine(b1, b2, Complex{1.0, 0.0}, Complex{1.0, 0.0});
    CHECK(collapse_probability(b1, psi) == doctest::Approx(0.3).epsilon(1e-10));
    CHECK(collapse_probability(b2, psi) == doctest::Approx(0.7).epsilon(1e-10));
    CHECK(collapse_probability(psi, psi) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(collapse_probability(b1, b2) < 1e-20);
    CHECK_THROWS_AS(collapse_probability(LabeledWavefunction::zero(g, 1), psi), Error);
}

TEST_CASE("branch decomposition: residual gate, weights, cross terms") {
    const ConfigurationGrid g = make_grid({{-32.0, 32.0, 512}});
    const LabeledWavefunction b1 = packet(g, -10.0, 1.0, 0.0, std::sqrt(0.3));
    const LabeledWavefunction b2 = packet(g, 10.0, 1.0, 0.0, std::sqrt(0.7));
    const LabeledWavefunction psi = combine(b1, b2, Complex{1.0, 0.0}, Complex{1.0, 0.0});
    const BranchDecomposition d = BranchDecomposition::build(psi, {b1, b2});
    CHECK(d.residual < 1e-10);
    CHECK(d.weights[0] == doctest::Approx(0.3).epsilon(1e-10));
    CHECK(d.weights[1] == doctest::Approx(0.7).epsilon(1e-10));
    CHECK(std::abs(d.cross_terms) < 1e-10);

    CHECK_THROWS_AS(BranchDecomposition::build(psi, {b1, b1}), Error);
}

TEST_CASE("classify_trajectory: clear, ambiguous and monte-carlo fractions") {
    const ConfigurationGrid g = make_grid({{-32.0, 32.0, 512}});
    const LabeledWavefunction b1 = packet(g, -10.0, 1.0, 0.0, std::sqrt(0.3));
    const LabeledWavefunction b2 = packet(g, 10.0, 1.0, 0.0, std::sqrt(0.7));
    const LabeledWavefunction psi = combine(b1, b2, Complex{1.0, 0.0}, Complex{1.0, 0.0});
    const BranchDecomposition d = BranchDecomposition::build(psi, {b1, b2});

    const Classification at_center = classify_trajectory(BeableConfiguration({-10.0}), d);
    CHECK(at_center.index == 0);
    CHECK_FALSE(at_center.ambiguous);
    CHECK_FALSE(at_center.unclassifiable);

    // Symmetric packets: the midpoint is ambiguous.
    const LabeledWavefunction s1 = packet(g, -6.0, 1.0, 0.0, 1.0 / std::numbers::sqrt2);
    const LabeledWavefunction s2 = packet(g, 6.0, 1.0, 0.0, 1.0 / std::numbers::sqrt2);
    const LabeledWavefunction sym = combine(s1, s2, Complex{1.0, 0.0}, Complex{1.0, 0.0});
    const BranchDecomposition ds = BranchDecomposition::build(sym, {s1, s2});
    CHECK(classify_trajectory(BeableConfiguration({0.01}), ds).ambiguous);
    // Far outside every support: unclassifiable.
    CHECK(classify_trajectory(BeableConfiguration({-30.0}), ds).unclassifiable);

    // Equilibrium sample splits by the Born weights within binomial error.
    const EnsembleSample sample = sample_equilibrium(beable_density(psi), 2000, 99);
    const BornReport report = born_fraction(sample.points, d);
    CHECK(std::abs(report.fractions[0] - 0.3) < 3.0 * std::sqrt(0.3 * 0.7 / 2000.0));
    CHECK(report.unclassifiable == 0);
}

TEST_CASE("detect_effective_collapse: disjoint branches collapse at t = 0") {
    const ConfigurationGrid g = make_grid({{-32.0, 32.0, 512}});
    HamiltonianSpec h;
    h.grid = g;
    h.labels = 1;
    h.kinetic_metric = {1.0};
    h.validate();

    // Packets flying apart with opposite momenta.
    const LabeledWavefunction b1 = packet(g, -10.0, 1.0, -1.0, std::sqrt(0.5));
    const LabeledWavefunction b2 = packet(g, 10.0, 1.0, 1.0, std::sqrt(0.5));
    const LabeledWavefunction psi = combine(b1, b2, Complex{1.0, 0.0}, Complex{1.0, 0.0});

    const double dt = 0.01;
    const std::size_t steps = 50, stride = 10;
    std::vector<BranchSnapshot> history;
    SplitStepEvolver e1(h, dt), e2(h, dt);
    e1.load(b1);
    e2.load(b2);
    history.push_back({0.0, {b1, b2}});
    PropagateOptions opt;
    opt.store_stride = stride;
    const std::vector<BeableConfiguration> starts{BeableConfiguration({-10.3})};
    const EnsembleRun run = propagate_ensemble(starts, psi, h, dt, steps, opt);
    for (std::size_t s = stride; s <= steps; s += stride) {
        e1.step(stride);
        e2.step(stride);
        history.push_back({e1.time(), {e1.snapshot(), e2.snapshot()}});
    }

    const CollapseReport report =
        detect_effective_collapse(run.trajectories[0], history, 1e-6, h);
    REQUIRE(report.collapse_time.has_value());
    CHECK(*report.collapse_time == 0.0);
    REQUIRE(report.branch_index.has_value());
    CHECK(*report.branch_index == 0);
    CHECK(report.velocity_agreement_error < 1e-8);

    // A single branch reports no collapse event and zero disagreement.
    std::vector<BranchSnapshot> solo;
    solo.push_back({0.0, {b1}});
    const CollapseReport single = detect_effective_collapse(run.trajectories[0], solo, 1e-6, h);
    CHECK_FALSE(single.collapse_time.has_value());
    CHECK(single.velocity_agreement_error == 0.0);
}

TEST_CASE("measurement scenario: pointer separation drives the collapse") {
    const ConfigurationGrid g = make_grid({{-6.0, 18.0, 512}});
    const double coupling = 2.0, width = 0.5, dt = 0.005;
    const std::size_t steps = 600, stride = 20;
    const std::vector<Complex> amps{Complex{std::sqrt(0.3), 0.0}, Complex{std::sqrt(0.7), 0.0}};
    const MeasurementScenario scenario =
        build_measurement_scenario(2, g, coupling, dt * steps, amps, width, 0.0, 20.0);
    CHECK(scenario.warnings.empty());
    CHECK(scenario.hamiltonian.momentum_coupling[0][0] == doctest::Approx(coupling));
    CHECK(scenario.hamiltonian.momentum_coupling[1][0] == doctest::Approx(2.0 * coupling));

    // Branch templates reassemble the initial state.
    const BranchDecomposition d0 =
        BranchDecomposition::build(scenario.initial_state, scenario.branch_template);
    CHECK(d0.weights[0] == doctest::Approx(0.3).epsilon(1e-10));

    std::vector<BranchSnapshot> history;
    std::vector<std::unique_ptr<SplitStepEvolver>> evs;
    for (const LabeledWavefunction& br : scenario.branch_template) {
        evs.push_back(std::make_unique<SplitStepEvolver>(scenario.hamiltonian, dt));
        evs.back()->load(br);
    }
    history.push_back({0.0, scenario.branch_template});
    const EnsembleSample sample =
        sample_equilibrium(beable_density(scenario.initial_state), 5, 2024);
    PropagateOptions opt;
    opt.store_stride = stride;
    const EnsembleRun run =
        propagate_ensemble(sample.points, scenario.initial_state, scenario.hamiltonian, dt,
                           steps, opt);
    for (std::size_t s = stride; s <= steps; s += stride) {
        BranchSnapshot snap;
        snap.time = 0.0;
        for (auto& ev : evs) {
            ev->step(stride);
            snap.branches.push_back(ev->snapshot());
        }
        snap.time = evs[0]->time();
        history.push_back(std::move(snap));
    }

    const CollapseReport report =
        detect_effective_collapse(run.trajectories[0], history, 1e-6, scenario.hamiltonian);
    REQUIRE(report.collapse_time.has_value());
    // Packet centers separate at rate `coupling`; the threshold crossing sits
    // between 5 and 12 pointer widths of separation.
    const double separation = coupling * *report.collapse_time;
    CHECK(separation > 5.0 * width);
    CHECK(separation < 12.0 * width);
    CHECK(report.velocity_agreement_error < 1e-3);

    // The density overlap series decays monotonically.
    for (std::size_t i = 1; i < report.overlap_history.size(); ++i)
        CHECK(report.overlap_history[i] <= report.overlap_history[i - 1] + 1e-12);

    // Degenerate amplitude vector: one branch, deterministic shift, no split.
    const std::vector<Complex> single{Complex{1.0, 0.0}, Complex{}};
    const MeasurementScenario solo =
        build_measurement_scenario(2, g, coupling, dt * steps, single, width, 0.0, 20.0);
    const BornReport fractions = born_fraction(sample.points, BranchDecomposition::build(
                                                                  solo.initial_state,
                                                                  solo.branch_template));
    CHECK(fractions.fractions[0] == doctest::Approx(1.0));

    // Too-weak coupling warns about unseparated packets.
    const MeasurementScenario weak =
        build_measurement_scenario(2, g, 0.1, 1.0, amps, width, 0.0, 20.0);
    CHECK(weak.warnings.size() == 1);
}
