#include "pwsim/mode_basis.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace pwsim {

namespace {
constexpr double kZeroTol = 1e-12;

// sqrt(2) * (2 pi)^(-3/2): the +-k pair of the continuum expansion carries
// sqrt(2) per real quadrature.
double reconstruction_amplitude() {
    const double two_pi = 2.0 * std::numbers::pi;
    return std::numbers::sqrt2 / (two_pi * std::sqrt(two_pi));
}
}  // namespace

ModeBasis ModeBasis::subset(std::span<const std::size_t> indices) const {
    ModeBasis out;
    out.truncated = true;
    out.modes.reserve(indices.size());
    for (std::size_t i : indices) {
        if (i >= modes.size()) throw Error("mode basis subset: index out of range");
        out.modes.push_back(modes[i]);
    }
    return out;
}

std::pair<Eigen::Vector3d, Eigen::Vector3d> canonical_polarizations(const Eigen::Vector3d& k) {
    const Eigen::Vector3d z(0.0, 0.0, 1.0);
    Eigen::Vector3d cross = k.cross(z);
    if (cross.norm() < kZeroTol * k.norm()) {
        return {Eigen::Vector3d(1.0, 0.0, 0.0), Eigen::Vector3d(0.0, 1.0, 0.0)};
    }
    const Eigen::Vector3d eps1 = cross.normalized();
    const Eigen::Vector3d eps2 = k.cross(eps1).normalized();
    return {eps1, eps2};
}

ModeBasis build_mode_basis(const std::vector<Eigen::Vector3d>& k_list) {
    if (k_list.empty()) throw Error("mode basis: empty k list");
    for (std::size_t i = 0; i < k_list.size(); ++i) {
        if (k_list[i].norm() < kZeroTol) {
            std::ostringstream os;
            os << "mode basis: k[" << i << "] is zero (no transversal mode at zero frequency)";
            throw Error(os.str());
        }
        for (std::size_t j = i + 1; j < k_list.size(); ++j) {
            if ((k_list[i] - k_list[j]).norm() < kZeroTol ||
                (k_list[i] + k_list[j]).norm() < kZeroTol) {
                std::ostringstream os;
                os << "mode basis: k[" << i << "] and k[" << j
                   << "] form a duplicate +-k pair; retain one representative";
                throw Error(os.str());
            }
        }
    }

    ModeBasis basis;
    const double amplitude = reconstruction_amplitude();
    for (const Eigen::Vector3d& k : k_list) {
        const auto [eps1, eps2] = canonical_polarizations(k);
        const double omega = k.norm();
        for (int pol = 1; pol <= 2; ++pol) {
            const Eigen::Vector3d& eps = (pol == 1) ? eps1 : eps2;
            for (ModeParity parity : {ModeParity::cosine, ModeParity::sine}) {
                basis.modes.push_back(RealMode{k, pol, eps, parity, omega, amplitude});
            }
        }
    }
    return basis;
}

}  // namespace pwsim
