#include <doctest.h>

#include <cmath>
#include <numbers>
#include <pwsim/rng.hpp>
#include <pwsim/wavefunction.hpp>

using namespace pwsim;

namespace {

LabeledWavefunction unit_gaussian(const ConfigurationGrid& g, double center = 0.0,
                                  double width = 1.0, std::vector<Complex> weights = {{1.0, 0.0}}) {
    GaussianSpec spec;
    spec.centers.assign(g.dims(), center);
    spec.widths.assign(g.dims(), width);
    return normalize(gaussian_packet(g, spec, std::move(weights)));
}

// Random unitary from composing label-pair rotations.
std::vector<Complex> random_unitary(std::size_t L, RandomStream& rng) {
    std::vector<Complex> u(L * L, Complex{});
    for (std::size_t i = 0; i < L; ++i) u[i * L + i] = 1.0;
    for (std::size_t a = 0; a < L; ++a) {
        for (std::size_t b = a + 1; b < L; ++b) {
            const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
            const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
            const Complex c{std::cos(theta), 0.0};
            const Complex s = Complex{std::cos(phi), std::sin(phi)} * std::sin(theta);
            std::vector<Complex> next = u;
            for (std::size_t j = 0; j < L; ++j) {
                next[a * L + j] = c * u[a * L + j] + s * u[b * L + j];
                next[b * L + j] = -std::conj(s) * u[a * L + j] + c * u[b * L + j];
            }
            u = std::move(next);
        }
    }
    return u;
}

}  // namespace

TEST_CASE("normalize: uniform amplitude on a unit-volume grid") {
    const ConfigurationGrid g = make_grid({{0.0, 1.0, 16}});
    const Complex c{0.3, -0.4};
    const LabeledWavefunction psi(g, 1, std::vector<Complex>(16, c));
    const LabeledWavefunction n = normalize(psi);
    // c/|c| * sqrt(1/volume) with volume 1.
    const Complex expected = c / std::abs(c);
    for (std::size_t i = 0; i < 16; ++i) {
        CHECK(n.at(0, i).real() == doctest::Approx(expected.real()).epsilon(1e-14));
        CHECK(n.at(0, i).imag() == doctest::Approx(expected.imag()).epsilon(1e-14));
    }
    CHECK(n.squared_norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("normalize: idempotent on an already-normalized gaussian") {
    const ConfigurationGrid g = make_grid({{-8.0, 8.0, 128}});
    const LabeledWavefunction psi = unit_gaussian(g);
    const LabeledWavefunction again = normalize(psi);
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(std::abs(again.at(0, i) - psi.at(0, i)) < 1e-14);
}

TEST_CASE("normalize: preserves label weight ratios") {
    const ConfigurationGrid g = make_grid({{-8.0, 8.0, 64}});
    const LabeledWavefunction psi =
        unit_gaussian(g, 0.0, 1.0, {Complex{std::sqrt(3.0), 0.0}, Complex{1.0, 0.0}});
    const DensityField rho = beable_density(psi);
    double w0 = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) w0 += std::norm(psi.at(0, i));
    w0 *= g.cell_volume();
    CHECK(w0 == doctest::Approx(0.75).epsilon(1e-10));
    CHECK(rho.integral() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("normalize: rejects zero norm") {
    const ConfigurationGrid g = make_grid({{0.0, 1.0, 8}});
    const LabeledWavefunction zero = LabeledWavefunction::zero(g, 1);
    CHECK_THROWS_AS(normalize(zero), Error);
}

TEST_CASE("wavefunction rejects non-finite amplitudes") {
    const ConfigurationGrid g = make_grid({{0.0, 1.0, 8}});
    std::vector<Complex> amps(8, Complex{1.0, 0.0});
    amps[3] = Complex{std::nan(""), 0.0};
    CHECK_THROWS_AS(LabeledWavefunction(g, 1, amps), Error);
}

TEST_CASE("beable_density: single label is |psi|^2, two equal labels sum") {
    const ConfigurationGrid g = make_grid({{-8.0, 8.0, 64}});
    const LabeledWavefunction psi = unit_gaussian(g);
    const DensityField rho = beable_density(psi);
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(rho.values[i] == doctest::Approx(std::norm(psi.at(0, i))).epsilon(1e-15));

    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    const LabeledWavefunction two =
        unit_gaussian(g, 0.0, 1.0, {Complex{inv_sqrt2, 0.0}, Complex{inv_sqrt2, 0.0}});
    const DensityField rho2 = beable_density(two);
    const LabeledWavefunction one = unit_gaussian(g);
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(rho2.values[i] == doctest::Approx(std::norm(one.at(0, i))).epsilon(1e-12));
}

TEST_CASE("beable_density: spinor weights drop out") {
    const ConfigurationGrid g = make_grid({{-8.0, 8.0, 64}});
    for (double theta : {0.0, 0.4, 1.1}) {
        const LabeledWavefunction psi = unit_gaussian(
            g, 0.0, 1.0, {Complex{std::cos(theta), 0.0}, Complex{std::sin(theta), 0.0}});
        const LabeledWavefunction ref = unit_gaussian(g);
        const DensityField rho = beable_density(psi);
        for (std::size_t i = 0; i < g.size(); i += 7)
            CHECK(rho.values[i] == doctest::Approx(std::norm(ref.at(0, i))).epsilon(1e-12));
    }
}

TEST_CASE("reduced_density: diagonal equals beable density exactly") {
    const ConfigurationGrid g = make_grid({{-8.0, 8.0, 64}});
    GaussianSpec spec;
    spec.centers = {0.3};
    spec.widths = {1.2};
    spec.momenta = {0.7};
    const LabeledWavefunction psi =
        normalize(gaussian_packet(g, spec, {Complex{0.6, 0.2}, Complex{0.4, -0.7}}));
    const DensityField rho = beable_density(psi);
    for (std::size_t i = 0; i < g.size(); i += 5) {
        const BeableConfiguration q = g.node_position(i);
        const ReducedDensitySample s = reduced_density(psi, q, q);
        CHECK(s.value.real() == doctest::Approx(rho.values[i]).epsilon(1e-14));
        CHECK(std::abs(s.value.imag()) < 1e-15);
    }
}

TEST_CASE("reduced_density: hermiticity and factorization") {
    const ConfigurationGrid g = make_grid({{-8.0, 8.0, 64}});
    GaussianSpec spec;
    spec.centers = {0.0};
    spec.widths = {1.0};
    spec.momenta = {1.3};
    const std::vector<Complex> weights{Complex{0.5, 0.5}, Complex{-0.3, 0.8}};
    const LabeledWavefunction psi = normalize(gaussian_packet(g, spec, weights));

    const BeableConfiguration q = g.node_position(20);
    const BeableConfiguration qp = g.node_position(45);
    const ReducedDensitySample a = reduced_density(psi, q, qp);
    const ReducedDensitySample b = reduced_density(psi, qp, q);
    CHECK(std::abs(a.value - std::conj(b.value)) < 1e-12);

    // Product state: value = (sum_f |c_f|^2) conj(phi(q')) phi(q).
    double csum = 0.0;
    for (const Complex& c : weights) csum += std::norm(c);
    GaussianSpec base = spec;
    const LabeledWavefunction phi = gaussian_packet(g, base, {Complex{1.0, 0.0}});
    const double scale = 1.0 / std::sqrt(phi.squared_norm() * csum);
    const Complex expected = csum * std::conj(phi.at(0, 45) * scale) * (phi.at(0, 20) * scale);
    CHECK(std::abs(a.value - expected) < 1e-12);

    CHECK_THROWS_AS(reduced_density(psi, BeableConfiguration({0.01}), qp), Error);
}

TEST_CASE("reduced_density: orthogonal branches have no cross terms") {
    const ConfigurationGrid g = make_grid({{-16.0, 16.0, 128}});
    GaussianSpec left;
    left.centers = {-6.0};
    left.widths = {0.8};
    GaussianSpec right;
    right.centers = {6.0};
    right.widths = {0.8};
    // Psi_1 = phi1, Psi_2 = phi2 on separate labels.
    const LabeledWavefunction phi1 = gaussian_packet(g, left, {Complex{1.0, 0.0}});
    const LabeledWavefunction phi2 = gaussian_packet(g, right, {Complex{1.0, 0.0}});
    std::vector<Complex> amps(2 * g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        amps[i] = phi1.at(0, i);
        amps[g.size() + i] = phi2.at(0, i);
    }
    const LabeledWavefunction psi(g, 2, amps);

    // Independent direct-summation oracle over the label index.
    for (std::size_t i = 10; i < g.size(); i += 17) {
        for (std::size_t j = 3; j < g.size(); j += 29) {
            const BeableConfiguration q = g.node_position(i);
            const BeableConfiguration qp = g.node_position(j);
            const Complex oracle = std::conj(phi1.at(0, j)) * phi1.at(0, i) +
                                   std::conj(phi2.at(0, j)) * phi2.at(0, i);
            const ReducedDensitySample s = reduced_density(psi, q, qp);
            CHECK(std::abs(s.value - oracle) < 1e-14);
        }
    }
}

TEST_CASE("inner_product: norm, disjoint supports, conjugate symmetry") {
    const ConfigurationGrid g = make_grid({{-16.0, 16.0, 256}});
    const LabeledWavefunction psi = unit_gaussian(g, 0.0, 1.0);
    CHECK(inner_product(psi, psi).real() == doctest::Approx(1.0).epsilon(1e-12));

    const LabeledWavefunction far1 = unit_gaussian(g, -10.0, 0.5);
    const LabeledWavefunction far2 = unit_gaussian(g, 10.0, 0.5);
    CHECK(std::abs(inner_product(far1, far2)) < 1e-12);

    GaussianSpec spec;
    spec.centers = {0.4};
    spec.widths = {1.0};
    spec.momenta = {2.0};
    const LabeledWavefunction chi = normalize(gaussian_packet(g, spec, {Complex{0.2, 0.9}}));
    const Complex ab = inner_product(psi, chi);
    const Complex ba = inner_product(chi, psi);
    CHECK(std::abs(ab - std::conj(ba)) < 1e-14);

    const ConfigurationGrid other = make_grid({{-16.0, 16.0, 128}});
    CHECK_THROWS_AS(inner_product(psi, unit_gaussian(other)), Error);
}

TEST_CASE("label-unitary invariance of the beable density") {
    const ConfigurationGrid g = make_grid({{-8.0, 8.0, 64}});
    RandomStream rng(99);
    for (std::size_t L : {2, 3}) {
        std::vector<Complex> weights;
        for (std::size_t f = 0; f < L; ++f)
            weights.emplace_back(rng.normal(), rng.normal());
        GaussianSpec spec;
        spec.centers = {0.2};
        spec.widths = {1.1};
        spec.momenta = {0.5};
        const LabeledWavefunction psi = normalize(gaussian_packet(g, spec, weights));
        const DensityField before = beable_density(psi);
        for (int rep = 0; rep < 25; ++rep) {
            const std::vector<Complex> u = random_unitary(L, rng);
            const DensityField after = beable_density(apply_label_matrix(psi, u));
            for (std::size_t i = 0; i < g.size(); i += 11)
                CHECK(after.values[i] == doctest::Approx(before.values[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("density positivity and integral consistency") {
    const ConfigurationGrid g = make_grid({{-8.0, 8.0, 64}});
    RandomStream rng(3);
    for (int rep = 0; rep < 10; ++rep) {
        GaussianSpec spec;
        spec.centers = {rng.uniform(-2.0, 2.0)};
        spec.widths = {rng.uniform(0.5, 2.0)};
        spec.momenta = {rng.uniform(-1.0, 1.0)};
        const LabeledWavefunction psi =
            gaussian_packet(g, spec, {Complex{rng.normal(), rng.normal()}});
        const DensityField rho = beable_density(psi);
        for (double v : rho.values) CHECK(v >= 0.0);
        CHECK(rho.integral() == doctest::Approx(psi.squared_norm()).epsilon(1e-10));
    }
}
