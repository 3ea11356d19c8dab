#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "scarlab/analytic.hpp"
#include "scarlab/model.hpp"
#include "scarlab/solver.hpp"
#include "scarlab/spectra.hpp"

namespace scarlab::io {

/// Eigenstate container (magic "QSCR1\0", little-endian): u32 nx, u32 ny,
/// 4 x f64 extent, f64 field, u32 K; per state f64 energy, f64 residual and
/// nx*ny interleaved (re, im) f64 values, row-major.  The convergence trace is
/// a run diagnostic and is not stored.
void write_eigenset(const std::string& path, const EigenSet& set);
EigenSet read_eigenset(const std::string& path);

/// Spectrum CSV: header "# scarlab spectrum v1 source=<source> hash=<h>",
/// then one energy per line at 17 significant digits (exact round-trip).
void write_spectrum(const std::string& path, const Spectrum& spectrum);
Spectrum read_spectrum(const std::string& path);

/// Potential sampled as CSV rows "x,y,V".
void write_potential_csv(const std::string& path, const PotentialGrid& pot);

/// Binary grid container (magic "QSGR1\0"): u32 nx, u32 ny, 4 x f64 extent,
/// nx*ny f64 values row-major.
void write_potential(const std::string& path, const PotentialGrid& pot);
PotentialGrid read_potential(const std::string& path);

/// Density-of-states CSV rows "B,E,density".
void write_dos_csv(const std::string& path, const DOSMap& map);

/// Dense binary matrix (magic "QSDM1\0"): u32 nb, u32 ne, b axis, e axis,
/// nb*ne f64 density values row-major.
void write_dos_matrix(const std::string& path, const DOSMap& map);
DOSMap read_dos_matrix(const std::string& path);

/// |psi|^2 as a 16-bit binary PGM (rows follow the x index, columns the y
/// index), scaled so the brightest cell maps to 65535.
void write_density_pgm(const std::string& path, const Grid2D& grid,
                       const std::vector<std::complex<double>>& state);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

std::uint64_t fnv1a64(const std::string& text);
std::string hex64(std::uint64_t v);

}  // namespace scarlab::io
