// grid.hpp — uniform configuration-space grids and beable coordinates.
//
// A ConfigurationGrid is a finite rectangular lattice over the configuration
// space carrying the wavefunction: one axis per beable coordinate (particle
// position component or field-mode amplitude). Nodes sit at min + i*spacing
// with spacing = (max - min)/points; under periodic boundaries node `points`
// is identified with node 0, so the nominal `max` edge is not itself a node.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pwsim {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

enum class Boundary { periodic, reflecting };

struct AxisSpec {
    double min = 0.0;
    double max = 0.0;
    std::size_t points = 0;
};

// Real vector of beable coordinates, one entry per grid axis.
struct BeableConfiguration {
    std::vector<double> coords;

    BeableConfiguration() = default;
    explicit BeableConfiguration(std::vector<double> c) : coords(std::move(c)) {}
    std::size_t size() const { return coords.size(); }
    double& operator[](std::size_t i) { return coords[i]; }
    double operator[](std::size_t i) const { return coords[i]; }
};

class ConfigurationGrid {
public:
    // Per-label amplitude cap; construction above it is rejected.
    static constexpr std::size_t kDefaultAmplitudeCap = std::size_t{1} << 26;
    static constexpr std::size_t kMinPointsPerAxis = 8;

    ConfigurationGrid() = default;
    ConfigurationGrid(std::vector<AxisSpec> axes, Boundary boundary = Boundary::periodic,
                      std::size_t amplitude_cap = kDefaultAmplitudeCap);

    std::size_t dims() const { return axes_.size(); }
    std::size_t size() const { return size_; }
    Boundary boundary() const { return boundary_; }
    const std::vector<AxisSpec>& axes() const { return axes_; }
    const AxisSpec& axis(std::size_t a) const { return axes_[a]; }

    double spacing(std::size_t a) const { return spacing_[a]; }
    double min_spacing() const;
    double cell_volume() const { return cell_volume_; }
    double coordinate(std::size_t a, std::size_t i) const { return axes_[a].min + spacing_[a] * static_cast<double>(i); }

    std::size_t stride(std::size_t a) const { return strides_[a]; }
    std::size_t flatten(std::span<const std::size_t> idx) const;
    void unflatten(std::size_t flat, std::span<std::size_t> idx) const;

    // Node coordinates of a flat index.
    BeableConfiguration node_position(std::size_t flat) const;

    // Flat node index for q when every coordinate lies on a node within tol
    // (absolute, per axis); nullopt otherwise.
    std::optional<std::size_t> node_at(const BeableConfiguration& q, double tol = 1e-9) const;

    // Map a coordinate into the primary domain (periodic wrap; identity for
    // reflecting grids).
    double wrap(std::size_t a, double x) const;
    bool contains(const BeableConfiguration& q) const;

    bool operator==(const ConfigurationGrid& other) const;
    bool operator!=(const ConfigurationGrid& other) const { return !(*this == other); }

private:
    std::vector<AxisSpec> axes_;
    std::vector<double> spacing_;
    std::vector<std::size_t> strides_;  // row-major, last axis fastest
    std::size_t size_ = 0;
    double cell_volume_ = 1.0;
    Boundary boundary_ = Boundary::periodic;
};

ConfigurationGrid make_grid(std::vector<AxisSpec> extents, Boundary boundary = Boundary::periodic,
                            std::size_t amplitude_cap = ConfigurationGrid::kDefaultAmplitudeCap);

}  // namespace pwsim
