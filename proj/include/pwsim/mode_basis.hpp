// mode_basis.hpp — truncated real-mode basis for the transversal vector field.
//
// Each retained wave vector k (one representative per +-k pair) expands into
// two polarizations x two parities (cosine/sine standing waves), giving four
// real mode coordinates with unit-mass oscillator dynamics at frequency |k|.
// The reconstruction amplitude per real mode is recorded in the basis so
// physical-space fields are self-consistent with the mode Hamiltonian.

#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "pwsim/grid.hpp"

namespace pwsim {

enum class ModeParity { cosine, sine };

struct RealMode {
    Eigen::Vector3d k;
    int polarization = 1;  // 1 or 2
    Eigen::Vector3d epsilon;
    ModeParity parity = ModeParity::cosine;
    double frequency = 0.0;  // |k|
    double amplitude = 0.0;  // reconstruction normalization
};

struct ModeBasis {
    std::vector<RealMode> modes;
    bool truncated = false;  // true for subsets of a full 2x2 expansion

    std::size_t size() const { return modes.size(); }

    // Retain a subset of real modes (desk-size scenarios); order preserved.
    ModeBasis subset(std::span<const std::size_t> indices) const;
};

// Canonical polarization pair for k: (x_hat, y_hat) when k is parallel to
// z_hat, otherwise (normalize(k x z_hat), normalize(k x eps1)).
std::pair<Eigen::Vector3d, Eigen::Vector3d> canonical_polarizations(const Eigen::Vector3d& k);

// Expands every k into 2 polarizations x 2 parities. Rejects k = 0 and
// duplicate +-k pairs.
ModeBasis build_mode_basis(const std::vector<Eigen::Vector3d>& k_list);

}  // namespace pwsim
