#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "scarlab/grid.hpp"
#include "scarlab/model.hpp"

namespace scarlab {

struct SolverConfig {
    int k = 1;               ///< requested eigenpair count
    double tol = 1e-6;       ///< residual bound ||(H - E)psi||
    int max_iters = 20000;   ///< cap on total propagation steps
    std::vector<double> dtau_schedule;  ///< decreasing; empty selects the default
    int extra_states = -1;   ///< overshoot; negative selects max(50, 5% of k)
    std::uint64_t seed = 12345;  ///< initial random block

    static std::vector<double> default_schedule();
    int overshoot() const;
    void validate() const;
};

/// Lowest-K eigenpairs on a grid.  States are stored as complex grid functions
/// regardless of field strength and are orthonormal under the cell-area
/// weighted inner product.
struct EigenSet {
    Grid2D grid;
    double b_field = 0.0;
    std::vector<double> energies;
    std::vector<double> residuals;
    std::vector<std::vector<std::complex<double>>> states;

    /// Ritz energy sum per relaxation cycle, one series per dtau stage
    /// (diagnostic; the sum is non-increasing within a stage).
    std::vector<std::vector<double>> convergence_trace;

    void validate() const;
};

/// Imaginary-time split-operator relaxation of a state block, the production
/// path.  Power-of-two grid dimensions required (spectral kinetic factor);
/// magnetic field handled by an exact factorization of the kinetic propagator.
EigenSet solve_itp(const PotentialGrid& pot, double b_field, const SolverConfig& cfg);

/// Dense finite-difference oracle: fourth-order stencil with link phases for
/// the field, Dirichlet truncation at the grid edge.  Small grids only.
EigenSet solve_dense(const PotentialGrid& pot, double b_field, int k);

/// One application of the discretized Hamiltonian (spectral derivatives,
/// symmetric gauge).  Used for residuals and operator-level tests.
std::vector<std::complex<double>> apply_hamiltonian(const std::vector<std::complex<double>>& state,
                                                    const PotentialGrid& pot, double b_field);

}  // namespace scarlab
