#include "pwsim/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pwsim {

ConfigurationGrid::ConfigurationGrid(std::vector<AxisSpec> axes, Boundary boundary,
                                     std::size_t amplitude_cap)
    : axes_(std::move(axes)), boundary_(boundary) {
    if (axes_.empty()) throw Error("grid: at least one axis required");
    size_ = 1;
    for (std::size_t a = 0; a < axes_.size(); ++a) {
        const AxisSpec& ax = axes_[a];
        if (!(ax.min < ax.max)) {
            std::ostringstream os;
            os << "grid: axis " << a << " has min " << ax.min << " >= max " << ax.max;
            throw Error(os.str());
        }
        if (ax.points < kMinPointsPerAxis) {
            std::ostringstream os;
            os << "grid: axis " << a << " has " << ax.points << " points, minimum is "
               << kMinPointsPerAxis;
            throw Error(os.str());
        }
        if (size_ > amplitude_cap / ax.points) {
            std::ostringstream os;
            os << "grid: total size exceeds amplitude cap " << amplitude_cap;
            throw Error(os.str());
        }
        size_ *= ax.points;
    }
    spacing_.resize(axes_.size());
    cell_volume_ = 1.0;
    for (std::size_t a = 0; a < axes_.size(); ++a) {
        spacing_[a] = (axes_[a].max - axes_[a].min) / static_cast<double>(axes_[a].points);
        cell_volume_ *= spacing_[a];
    }
    strides_.assign(axes_.size(), 1);
    for (std::size_t a = axes_.size(); a-- > 1;) strides_[a - 1] = strides_[a] * axes_[a].points;
}

double ConfigurationGrid::min_spacing() const {
    return *std::min_element(spacing_.begin(), spacing_.end());
}

std::size_t ConfigurationGrid::flatten(std::span<const std::size_t> idx) const {
    std::size_t flat = 0;
    for (std::size_t a = 0; a < axes_.size(); ++a) flat += idx[a] * strides_[a];
    return flat;
}

void ConfigurationGrid::unflatten(std::size_t flat, std::span<std::size_t> idx) const {
    for (std::size_t a = 0; a < axes_.size(); ++a) {
        idx[a] = flat / strides_[a];
        flat %= strides_[a];
    }
}

BeableConfiguration ConfigurationGrid::node_position(std::size_t flat) const {
    std::vector<std::size_t> idx(dims());
    unflatten(flat, idx);
    std::vector<double> x(dims());
    for (std::size_t a = 0; a < dims(); ++a) x[a] = coordinate(a, idx[a]);
    return BeableConfiguration(std::move(x));
}

std::optional<std::size_t> ConfigurationGrid::node_at(const BeableConfiguration& q,
                                                      double tol) const {
    if (q.size() != dims()) return std::nullopt;
    std::vector<std::size_t> idx(dims());
    for (std::size_t a = 0; a < dims(); ++a) {
        const double x = wrap(a, q[a]);
        const double pos = (x - axes_[a].min) / spacing_[a];
        const double rounded = std::round(pos);
        if (std::abs(pos - rounded) * spacing_[a] > tol) return std::nullopt;
        auto i = static_cast<long long>(rounded);
        if (i == static_cast<long long>(axes_[a].points) && boundary_ == Boundary::periodic) i = 0;
        if (i < 0 || i >= static_cast<long long>(axes_[a].points)) return std::nullopt;
        idx[a] = static_cast<std::size_t>(i);
    }
    return flatten(idx);
}

double ConfigurationGrid::wrap(std::size_t a, double x) const {
    if (boundary_ != Boundary::periodic) return x;
    if (x >= axes_[a].min && x < axes_[a].max) return x;  // bit-stable in-domain
    const double length = axes_[a].max - axes_[a].min;
    double y = std::fmod(x - axes_[a].min, length);
    if (y < 0) y += length;
    if (y >= length) y = 0.0;
    return axes_[a].min + y;
}

bool ConfigurationGrid::contains(const BeableConfiguration& q) const {
    if (q.size() != dims()) return false;
    for (std::size_t a = 0; a < dims(); ++a) {
        if (boundary_ == Boundary::periodic) continue;
        const double last = coordinate(a, axes_[a].points - 1);
        if (q[a] < axes_[a].min || q[a] > last) return false;
    }
    return true;
}

bool ConfigurationGrid::operator==(const ConfigurationGrid& other) const {
    if (boundary_ != other.boundary_ || axes_.size() != other.axes_.size()) return false;
    for (std::size_t a = 0; a < axes_.size(); ++a) {
        if (axes_[a].min != other.axes_[a].min || axes_[a].max != other.axes_[a].max ||
            axes_[a].points != other.axes_[a].points)
            return false;
    }
    return true;
}

ConfigurationGrid make_grid(std::vector<AxisSpec> extents, Boundary boundary,
                            std::size_t amplitude_cap) {
    return ConfigurationGrid(std::move(extents), boundary, amplitude_cap);
}

}  // namespace pwsim
