#pragma once

#include <complex>
#include <vector>

#include "scarlab/grid.hpp"

namespace scarlab {

/// Quantum numbers of a Fock-Darwin level: radial index n_r >= 0 and angular
/// index l (sign convention chosen so that the energy reads
/// E = (2 n_r + |l| + 1) sqrt(omega0^2 + B^2/4) - l B / 2, matching the
/// symmetric-gauge Hamiltonian used by the solver with angular factor e^{-i l theta}).
struct FDLabel {
    int n_r = 0;
    int l = 0;
    bool operator==(const FDLabel&) const = default;
    auto operator<=>(const FDLabel&) const = default;
};

/// A classical resonance (v_theta, v_r): angular step v_theta and radial step
/// v_r of the associated ladder in (n_r, l) space.  Stored gcd-reduced.
struct ResonanceLabel {
    int v_theta = 0;
    int v_r = 0;

    ResonanceLabel() = default;
    ResonanceLabel(int vtheta, int vr);

    double ratio() const { return static_cast<double>(v_r) / v_theta; }
    bool operator==(const ResonanceLabel&) const = default;
    auto operator<=>(const ResonanceLabel&) const = default;
};

double fock_darwin_energy(const FDLabel& label, double omega0, double b_field);

/// All labels with energy <= e_cut at the given field, sorted by (energy, l, n_r).
std::vector<FDLabel> enumerate_fd_labels(double omega0, double b_field, double e_cut);

/// Magnetic field at which the (v_theta, v_r) resonance condition is met:
/// B = (rho - 2)/sqrt(rho - 1) with rho = v_r/v_theta > 1.  Negative for
/// rho < 2; zero at rho = 2.
double resonance_field(const ResonanceLabel& label);

/// Fock-Darwin eigenstate sampled on a grid (unit continuum norm; the discrete
/// norm approaches 1 on converged grids).  Radial part evaluated with a
/// normalized Laguerre recurrence, stable to n_r ~ 100 and large |l|.
std::vector<std::complex<double>> fock_darwin_state(const FDLabel& label, double omega0,
                                                    double b_field, const Grid2D& grid);

/// Density-of-states map smoothed with a Gaussian window:
/// density(B, E) = sum_labels exp(-(E - E_label(B))^2 / (2 w^2)) / (w sqrt(2 pi)).
struct DOSMap {
    std::vector<double> b_axis;
    std::vector<double> e_axis;
    std::vector<double> density;  // row-major: density[ib * e_axis.size() + ie]

    double at(std::size_t ib, std::size_t ie) const { return density[ib * e_axis.size() + ie]; }
};

struct DOSAxes {
    double b_start = 0.0, b_stop = 2.0, b_step = 0.01;
    double e_start = 0.0, e_stop = 100.0, e_step = 0.05;
    double window = 0.001;
};

DOSMap dos_map(double omega0, const DOSAxes& axes);

}  // namespace scarlab
