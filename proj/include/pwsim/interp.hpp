// interp.hpp — multilinear interpolation stencils over grid node fields.

#pragma once

#include <span>
#include <vector>

#include "pwsim/grid.hpp"

namespace pwsim {

// Corner nodes and weights for multilinear interpolation at a point. For
// reflecting grids a point outside [min, last node] marks the stencil
// outside; periodic grids wrap.
struct InterpStencil {
    std::vector<std::size_t> nodes;
    std::vector<double> weights;
    bool inside = true;

    double apply(std::span<const double> values) const {
        double acc = 0.0;
        for (std::size_t c = 0; c < nodes.size(); ++c) acc += weights[c] * values[nodes[c]];
        return acc;
    }
};

// Reuses the output object's capacity; hot path for trajectory integration.
void make_stencil(const ConfigurationGrid& grid, const BeableConfiguration& q, InterpStencil& out);

inline InterpStencil make_stencil(const ConfigurationGrid& grid, const BeableConfiguration& q) {
    InterpStencil s;
    make_stencil(grid, q, s);
    return s;
}

}  // namespace pwsim
