#pragma once

#include <complex>
#include <vector>

#include "scarlab/analytic.hpp"
#include "scarlab/model.hpp"
#include "scarlab/stats.hpp"
#include "scarlab/subspectrum.hpp"

/// Serial re-implementations of the OpenMP-parallel kernels.  Each twin keeps
/// the per-element arithmetic and reduction order of its parallel counterpart,
/// so outputs must agree bitwise; tests assert that and the bench tool times
/// the pairs against each other.
namespace scarlab::serial_ref {

PotentialGrid build_potential_grid(const PotentialSpec& spec, const Grid2D& grid,
                                   const BumpField& bumps);

Delta3Curve delta3(const UnfoldedSpectrum& unfolded, const std::vector<double>& l_values);

DOSMap dos_map(double omega0, const DOSAxes& axes);

Subspectrum overlaps(const std::vector<std::complex<double>>& state, const Grid2D& grid,
                     const std::vector<BasisState>& basis, double tol);

}  // namespace scarlab::serial_ref
