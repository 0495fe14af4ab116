// ensemble.hpp — equilibrium sampling of beables and statistical checks.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pwsim/collapse.hpp"
#include "pwsim/rng.hpp"
#include "pwsim/wavefunction.hpp"

namespace pwsim {

enum class SampleMethod { rejection, metropolis };

struct EnsembleSample {
    std::vector<BeableConfiguration> points;
    std::uint64_t seed = 0;
    SampleMethod method = SampleMethod::rejection;
    std::vector<std::string> warnings;
};

// Draws n beable configurations from rho (multilinearly interpolated between
// nodes). Rejection sampling with envelope max(rho) for dims <= 2, Metropolis
// random walk (burn-in 1000, thinning 10) above; a rejection acceptance rate
// below 1e-4 falls back to Metropolis with a warning. Deterministic per seed.
EnsembleSample sample_equilibrium(const DensityField& rho, std::size_t n, std::uint64_t seed);
EnsembleSample sample_equilibrium(const DensityField& rho, std::size_t n, std::uint64_t seed,
                                  SampleMethod method);

// Piecewise-linear marginal CDF of a density field along one axis, on the
// midpoint-cell convention.
class MarginalCdf {
public:
    MarginalCdf(const DensityField& rho, std::size_t axis);
    double operator()(double x) const;

private:
    double origin_ = 0.0;  // left edge of the first cell
    double spacing_ = 0.0;
    std::vector<double> cumulative_;  // cumulative mass at cell right edges
};

// Kolmogorov-Smirnov statistic of samples against a model CDF.
double ks_statistic(std::vector<double> samples, const MarginalCdf& cdf);

// Asymptotic one-sample KS critical coefficients: D_crit = c / sqrt(n).
inline constexpr double kKsCritical5Percent = 1.36;
inline constexpr double kKsCritical1Percent = 1.63;

struct FitReport {
    std::vector<double> ks;  // per coordinate
    std::size_t samples = 0;
    double threshold = 0.0;
    bool pass = false;
};

// Per-coordinate marginal KS of the ensemble against beable_density(psi);
// passes iff every coordinate stays below critical_coefficient / sqrt(n).
FitReport equivariance_test(std::span<const BeableConfiguration> points,
                            const LabeledWavefunction& psi,
                            double critical_coefficient = kKsCritical1Percent);

struct BornReport {
    std::vector<std::size_t> counts;  // per branch
    std::vector<double> fractions;
    std::vector<double> std_errors;  // binomial sqrt(f(1-f)/n)
    std::size_t ambiguous = 0;
    std::size_t unclassifiable = 0;
    std::size_t total = 0;
};

BornReport born_fraction(std::span<const BeableConfiguration> points,
                         const BranchDecomposition& decomposition);

}  // namespace pwsim
