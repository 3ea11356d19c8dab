#pragma once

#include <cstddef>

#include "scarlab/error.hpp"

namespace scarlab {

// Uniform rectangular grid on [x0, x1) x [y0, y1).  Node (i, j) sits at
// (x0 + i*dx, y0 + j*dy); for a symmetric extent and even nx the origin is a
// node.  Values indexed row-major with the x index outermost.  The spectral
// solver treats the domain as periodic, which is harmless as long as states
// decay before the boundary.
struct Grid2D {
    int nx = 0;
    int ny = 0;
    double x0 = 0, x1 = 0, y0 = 0, y1 = 0;

    double dx() const { return (x1 - x0) / nx; }
    double dy() const { return (y1 - y0) / ny; }
    double x(int i) const { return x0 + i * dx(); }
    double y(int j) const { return y0 + j * dy(); }
    std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
    std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * ny + j; }
    double cell_area() const { return dx() * dy(); }
    double half_extent_x() const { return 0.5 * (x1 - x0); }
    double half_extent_y() const { return 0.5 * (y1 - y0); }

    bool operator==(const Grid2D&) const = default;

    static Grid2D centered(int nx, int ny, double half_extent) {
        Grid2D g{nx, ny, -half_extent, half_extent, -half_extent, half_extent};
        g.validate();
        return g;
    }

    void validate() const {
        require(nx > 0 && ny > 0, ErrorCode::ConfigError, "grid must have positive node counts");
        require(x1 > x0 && y1 > y0, ErrorCode::ConfigError, "grid extent must be non-degenerate");
        require(size() <= (std::size_t{1} << 24), ErrorCode::ProblemTooLarge,
                "grid exceeds 2^24 nodes");
    }
};

inline bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace scarlab
