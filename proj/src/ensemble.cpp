#include "pwsim/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pwsim/interp.hpp"

namespace pwsim {

namespace {

constexpr std::size_t kBurnIn = 1000;
constexpr std::size_t kThinning = 10;
constexpr double kRejectionFloorRate = 1e-4;
// Proposals spent probing the acceptance rate before giving up on rejection.
constexpr std::size_t kRejectionProbe = 200000;

double upper_edge(const ConfigurationGrid& g, std::size_t a) {
    // Sampling domain per axis: periodic grids cover [min, max); reflecting
    // grids the node span [min, last node].
    return g.boundary() == Boundary::periodic ? g.axis(a).max
                                              : g.coordinate(a, g.axis(a).points - 1);
}

BeableConfiguration argmax_node(const DensityField& rho) {
    const auto it = std::max_element(rho.values.begin(), rho.values.end());
    return rho.grid.node_position(static_cast<std::size_t>(it - rho.values.begin()));
}

EnsembleSample metropolis_sample(const DensityField& rho, std::size_t n, std::uint64_t seed,
                                 RandomStream& rng) {
    const ConfigurationGrid& g = rho.grid;
    const std::size_t d = g.dims();
    EnsembleSample out;
    out.seed = seed;
    out.method = SampleMethod::metropolis;
    out.points.reserve(n);

    BeableConfiguration q = argmax_node(rho);
    double rho_q = interpolate_density(rho, q);
    BeableConfiguration prop(std::vector<double>(d, 0.0));

    const std::size_t total = kBurnIn + n * kThinning;
    for (std::size_t s = 0; s < total; ++s) {
        for (std::size_t a = 0; a < d; ++a) {
            const double step = 2.0 * g.spacing(a);
            double x = q[a] + step * rng.normal();
            if (g.boundary() == Boundary::periodic) {
                x = g.wrap(a, x);
            } else {
                const double lo = g.axis(a).min;
                const double hi = upper_edge(g, a);
                if (x < lo || x > hi) x = q[a];  // reject moves off the grid
            }
            prop[a] = x;
        }
        const double rho_p = interpolate_density(rho, prop);
        const double u = rng.uniform();
        if (rho_q <= 0.0 || u * rho_q <= rho_p) {
            q = prop;
            rho_q = rho_p;
        }
        if (s >= kBurnIn && (s - kBurnIn) % kThinning == 0 && out.points.size() < n)
            out.points.push_back(q);
    }
    while (out.points.size() < n) out.points.push_back(q);
    return out;
}

EnsembleSample rejection_sample(const DensityField& rho, std::size_t n, std::uint64_t seed,
                                RandomStream& rng, bool* gave_up) {
    const ConfigurationGrid& g = rho.grid;
    const std::size_t d = g.dims();
    const double envelope = rho.max_value();
    if (!(envelope > 0.0)) throw Error("sample_equilibrium: density is identically zero");

    EnsembleSample out;
    out.seed = seed;
    out.method = SampleMethod::rejection;
    out.points.reserve(n);

    BeableConfiguration q(std::vector<double>(d, 0.0));
    std::size_t proposals = 0;
    while (out.points.size() < n) {
        for (std::size_t a = 0; a < d; ++a)
            q[a] = rng.uniform(g.axis(a).min, upper_edge(g, a));
        const double u = rng.uniform();
        ++proposals;
        if (u * envelope <= interpolate_density(rho, q)) out.points.push_back(q);
        if (proposals >= kRejectionProbe &&
            static_cast<double>(out.points.size()) <
                kRejectionFloorRate * static_cast<double>(proposals)) {
            *gave_up = true;
            return out;
        }
    }
    return out;
}

}  // namespace

EnsembleSample sample_equilibrium(const DensityField& rho, std::size_t n, std::uint64_t seed) {
    return sample_equilibrium(rho, n, seed,
                              rho.grid.dims() <= 2 ? SampleMethod::rejection
                                                   : SampleMethod::metropolis);
}

EnsembleSample sample_equilibrium(const DensityField& rho, std::size_t n, std::uint64_t seed,
                                  SampleMethod method) {
    if (n == 0) throw Error("sample_equilibrium: n must be positive");
    RandomStream rng(seed);
    if (method == SampleMethod::metropolis) return metropolis_sample(rho, n, seed, rng);

    bool gave_up = false;
    EnsembleSample out = rejection_sample(rho, n, seed, rng, &gave_up);
    if (gave_up) {
        std::ostringstream os;
        os << "sample_equilibrium: rejection acceptance rate below " << kRejectionFloorRate
           << "; falling back to metropolis";
        EnsembleSample mh = metropolis_sample(rho, n, seed, rng);
        mh.warnings.push_back(os.str());
        return mh;
    }
    return out;
}

MarginalCdf::MarginalCdf(const DensityField& rho, std::size_t axis) {
    const ConfigurationGrid& g = rho.grid;
    const std::size_t na = g.axis(axis).points;
    const std::size_t stride = g.stride(axis);
    spacing_ = g.spacing(axis);
    origin_ = g.axis(axis).min - 0.5 * spacing_;

    std::vector<double> mass(na, 0.0);
    for (std::size_t i = 0; i < g.size(); ++i)
        mass[(i / stride) % na] += rho.values[i];
    const double cell = g.cell_volume();
    double total = 0.0;
    cumulative_.resize(na);
    for (std::size_t j = 0; j < na; ++j) {
        total += mass[j] * cell;
        cumulative_[j] = total;
    }
    if (!(total > 0.0)) throw Error("marginal cdf: zero total mass");
    for (double& c : cumulative_) c /= total;
}

double MarginalCdf::operator()(double x) const {
    const double u = (x - origin_) / spacing_;
    if (u <= 0.0) return 0.0;
    const auto cell = static_cast<std::size_t>(u);
    if (cell >= cumulative_.size()) return 1.0;
    const double left = cell == 0 ? 0.0 : cumulative_[cell - 1];
    const double frac = u - static_cast<double>(cell);
    return left + frac * (cumulative_[cell] - left);
}

double ks_statistic(std::vector<double> samples, const MarginalCdf& cdf) {
    if (samples.empty()) throw Error("ks_statistic: empty sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double model = cdf(samples[i]);
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        worst = std::max({worst, std::abs(model - lo), std::abs(model - hi)});
    }
    return worst;
}

FitReport equivariance_test(std::span<const BeableConfiguration> points,
                            const LabeledWavefunction& psi, double critical_coefficient) {
    if (points.empty()) throw Error("equivariance_test: empty ensemble");
    const DensityField rho = beable_density(psi);
    const std::size_t d = psi.grid().dims();

    FitReport report;
    report.samples = points.size();
    report.threshold = critical_coefficient / std::sqrt(static_cast<double>(points.size()));
    report.pass = true;
    for (std::size_t a = 0; a < d; ++a) {
        MarginalCdf cdf(rho, a);
        std::vector<double> coords(points.size());
        for (std::size_t i = 0; i < points.size(); ++i)
            coords[i] = psi.grid().wrap(a, points[i][a]);
        const double ks = ks_statistic(std::move(coords), cdf);
        report.ks.push_back(ks);
        if (ks >= report.threshold) report.pass = false;
    }
    return report;
}

BornReport born_fraction(std::span<const BeableConfiguration> points,
                         const BranchDecomposition& decomposition) {
    BornReport report;
    report.total = points.size();
    report.counts.assign(decomposition.branches.size(), 0);
    const std::vector<DensityField> densities = decomposition.branch_densities();
    for (const BeableConfiguration& q : points) {
        const Classification c = classify_point(q, densities);
        if (c.unclassifiable) {
            ++report.unclassifiable;
            continue;
        }
        if (c.ambiguous) ++report.ambiguous;
        ++report.counts[c.index];
    }
    const double n = static_cast<double>(report.total);
    for (std::size_t b = 0; b < report.counts.size(); ++b) {
        const double f = n > 0 ? static_cast<double>(report.counts[b]) / n : 0.0;
        report.fractions.push_back(f);
        report.std_errors.push_back(n > 0 ? std::sqrt(f * (1.0 - f) / n) : 0.0);
    }
    return report;
}

}  // namespace pwsim
