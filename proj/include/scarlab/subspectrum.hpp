#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "scarlab/analytic.hpp"
#include "scarlab/model.hpp"
#include "scarlab/solver.hpp"

namespace scarlab {

/// One unperturbed reference state with its quantum-number label.
struct BasisState {
    FDLabel label;
    double energy = 0.0;
    std::vector<std::complex<double>> values;  // unit norm under the grid measure
};

struct WeightEntry {
    std::size_t m = 0;  // index into the basis list
    FDLabel label;
    double energy = 0.0;
    double weight = 0.0;  // |c_m|^2
    std::complex<double> coeff;
};

/// Expansion of one perturbed eigenstate over the unperturbed basis.
struct Subspectrum {
    int state_index = -1;
    double completeness = 0.0;  // sum of weights over the computed basis
    std::vector<WeightEntry> weights;  // sorted by basis energy

    bool complete(double threshold = 0.99) const { return completeness >= threshold; }
};

/// Ladder of basis labels generated from an anchor by the resonance step:
/// (n_r + k v_r, l - k v_theta) for k in [-k_max, k_max], n_r >= 0.
struct ResonantSet {
    FDLabel anchor;
    ResonanceLabel resonance;
    std::vector<FDLabel> members;  // ascending k

    bool contains(const FDLabel& label) const;
};

/// Expansion coefficients c_m = <phi_m|psi> under the grid inner product.
/// The basis must be orthonormal within 10*tol.
Subspectrum overlaps(const std::vector<std::complex<double>>& state, const Grid2D& grid,
                     const std::vector<BasisState>& basis, double tol);

ResonantSet resonant_set(const FDLabel& anchor, const ResonanceLabel& res, int k_max);

struct ScarStrength {
    double set_weight = 0.0;     // total weight on the set's members
    double participation = 0.0;  // 1 / sum of squared weights
};

/// Requires completeness >= 0.99.
ScarStrength scar_strength(const Subspectrum& sub, const ResonantSet& set);

/// Maximizes set_weight over anchors present in the subspectrum and the given
/// candidate resonances.  Ties break toward smaller v_theta + v_r, then lower
/// anchor energy.
std::pair<ResonantSet, double> best_resonant_set(const Subspectrum& sub,
                                                 const std::vector<ResonanceLabel>& candidates,
                                                 int k_max);

/// Unperturbed labeled basis around e_center: sampled Fock-Darwin states for
/// the harmonic well, otherwise a zero-amplitude solve whose degenerate
/// clusters are recombined into angular-momentum eigenstates.  Includes every
/// state within window_spacings mean level spacings of e_center plus the
/// members of candidate-resonance ladders anchored inside that window; ladder
/// members the grid cannot represent are skipped, while an unrepresentable
/// window member is an error.
std::vector<BasisState> build_unperturbed_basis(const PotentialSpec& spec, const Grid2D& grid,
                                                double b_field, double e_center,
                                                double window_spacings,
                                                const std::vector<ResonanceLabel>& ladders,
                                                int k_max, const SolverConfig& solver_cfg);

}  // namespace scarlab
