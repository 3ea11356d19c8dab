#pragma once

#include <cstdint>
#include <vector>

#include "scarlab/grid.hpp"

namespace scarlab {

/// Parameters of the confining well and its Gaussian bump perturbation.
///
/// External well: V_ext(r) = (1/2) * omega0^2 * |r|^n.
/// Perturbation:  V_imp(r) = M * sum_i exp(-|r - r_i|^2 / (2 sigma^2)),
/// with bump centers r_i drawn uniformly at the given areal density.
/// Atomic units throughout.
struct PotentialSpec {
    double n = 5.0;        ///< well exponent (2 = harmonic reference)
    double omega0 = 1.0;   ///< confinement strength
    double M = 0.0;        ///< bump amplitude; full width at half maximum is 2*sqrt(2 ln 2)*sigma
    double sigma = 0.1;    ///< bump width
    double density = 2.0;  ///< bumps per unit area
    std::uint64_t seed = 1;

    void validate() const {
        require(n >= 1.0, ErrorCode::ConfigError, "well exponent must be >= 1");
        require(omega0 > 0.0, ErrorCode::ConfigError, "omega0 must be positive");
        require(M >= 0.0, ErrorCode::ConfigError, "bump amplitude must be non-negative");
        require(sigma > 0.0, ErrorCode::ConfigError, "bump width must be positive");
        require(density >= 0.0, ErrorCode::ConfigError, "bump density must be non-negative");
    }
};

struct Region {
    double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
    double area() const { return (x1 - x0) * (y1 - y0); }
};

struct Bump {
    double x = 0, y = 0;
};

/// A realized disorder landscape: centers plus the amplitude/width they carry.
struct BumpField {
    std::vector<Bump> centers;
    double M = 0.0;
    double sigma = 0.1;
};

struct PotentialGrid {
    Grid2D grid;
    std::vector<double> v;  // row-major per Grid2D::idx
};

double eval_external_potential(const PotentialSpec& spec, double x, double y);

/// Classical turning radius of the unperturbed well at energy e.
double turning_radius(const PotentialSpec& spec, double e);

/// Weyl estimate of the number of states below energy e in the unperturbed well.
double semiclassical_count(const PotentialSpec& spec, double e);

/// Inverse of semiclassical_count: energy below which ~count states fit.
double semiclassical_energy(const PotentialSpec& spec, double count);

/// Square region circumscribing the turning circle at e_max plus a 2*sigma margin,
/// the default area the bump field fills.
Region default_bump_region(const PotentialSpec& spec, double e_max);

/// Draw round(density * area) centers uniformly over the region; deterministic
/// in spec.seed, independent of platform.
BumpField generate_bumps(const PotentialSpec& spec, const Region& region);

/// Sum of Gaussian bumps at (x, y), accumulated in ascending center order so the
/// result is bit-reproducible.
double eval_perturbation(const BumpField& bumps, double x, double y);

/// Sample external + perturbation on every grid node.
PotentialGrid build_potential_grid(const PotentialSpec& spec, const Grid2D& grid,
                                   const BumpField& bumps);

PotentialGrid build_potential_grid(const PotentialSpec& spec, const Grid2D& grid);

}  // namespace scarlab
