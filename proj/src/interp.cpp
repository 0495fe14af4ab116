#include "pwsim/interp.hpp"

#include <cmath>

namespace pwsim {

void make_stencil(const ConfigurationGrid& grid, const BeableConfiguration& q,
                  InterpStencil& out) {
    const std::size_t d = grid.dims();
    const std::size_t corners = std::size_t{1} << d;
    out.nodes.assign(corners, 0);
    out.weights.assign(corners, 1.0);
    out.inside = true;

    for (std::size_t a = 0; a < d; ++a) {
        const AxisSpec& ax = grid.axis(a);
        const double h = grid.spacing(a);
        const std::size_t n = ax.points;
        std::size_t i0, i1;
        double frac;
        if (grid.boundary() == Boundary::periodic) {
            const double y = grid.wrap(a, q[a]);
            double u = (y - ax.min) / h;
            if (u >= static_cast<double>(n)) u = 0.0;
            i0 = static_cast<std::size_t>(u);
            if (i0 >= n) i0 = n - 1;
            frac = u - static_cast<double>(i0);
            i1 = (i0 + 1 == n) ? 0 : i0 + 1;
        } else {
            const double last = grid.coordinate(a, n - 1);
            if (q[a] < ax.min || q[a] > last) {
                out.inside = false;
                return;
            }
            double u = (q[a] - ax.min) / h;
            i0 = static_cast<std::size_t>(u);
            if (i0 >= n - 1) i0 = n - 2;
            frac = u - static_cast<double>(i0);
            if (frac > 1.0) frac = 1.0;
            i1 = i0 + 1;
        }
        const std::size_t stride = grid.stride(a);
        const std::size_t bit = std::size_t{1} << a;
        for (std::size_t c = 0; c < corners; ++c) {
            if (c & bit) {
                out.nodes[c] += i1 * stride;
                out.weights[c] *= frac;
            } else {
                out.nodes[c] += i0 * stride;
                out.weights[c] *= 1.0 - frac;
            }
        }
    }
}

}  // namespace pwsim
