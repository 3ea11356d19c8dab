#pragma once

#include <string>
#include <vector>

#include "scarlab/error.hpp"

namespace scarlab {

/// Sorted list of energy levels.  Exact degeneracies are allowed; `source`
/// records provenance (a solver config hash or "synthetic").
struct Spectrum {
    std::vector<double> energies;  // non-decreasing
    std::string source = "unknown";

    void validate() const;
};

/// Staircase count N(e) = #{levels <= e}.
std::size_t staircase(const Spectrum& spectrum, double e);

/// How the smooth staircase is modeled during unfolding.
struct UnfoldMethod {
    enum class Kind {
        ThomasFermi,  ///< cubic polynomial in t = E^(1 + 2/n), for power-law wells
        Polynomial,   ///< degree-6 polynomial in E, generic fallback
    };
    Kind kind = Kind::Polynomial;
    double well_exponent = 2.0;  // n, used by ThomasFermi

    static UnfoldMethod thomas_fermi(double n) { return {Kind::ThomasFermi, n}; }
    static UnfoldMethod polynomial() { return {Kind::Polynomial, 0.0}; }
};

/// Unfolded levels eps_m = Nbar(E_m) with unit local mean spacing.  Downstream
/// statistics use the index window [window_lo, window_hi), which trims 2% of
/// levels on each edge.
struct UnfoldedSpectrum {
    std::vector<double> levels;       // non-decreasing, one per input level
    std::size_t window_lo = 0;
    std::size_t window_hi = 0;
    std::string method;               // descriptor of the fit actually used
    double mean_spacing = 0.0;        // within the window

    std::size_t window_size() const { return window_hi - window_lo; }
};

UnfoldedSpectrum unfold(const Spectrum& spectrum, const UnfoldMethod& method);

/// Nearest-neighbour spacings within the window (window_size - 1 values; exact
/// degeneracies survive as zeros).
std::vector<double> spacings(const UnfoldedSpectrum& unfolded);

}  // namespace scarlab
