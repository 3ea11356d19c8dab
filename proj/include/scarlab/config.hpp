#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scarlab/analytic.hpp"
#include "scarlab/grid.hpp"
#include "scarlab/model.hpp"
#include "scarlab/solver.hpp"
#include "scarlab/spectra.hpp"
#include "scarlab/stats.hpp"

namespace scarlab {

/// Scalar field or an inclusive sweep axis.
struct FieldBlock {
    bool sweep = false;
    double b = 0.0;
    double start = 0.0, stop = 0.0, step = 0.0;

    std::vector<double> values() const;
};

struct SolverBlock {
    int grid = 128;
    double extent = 4.5;
    int num_states = 600;
    double tol = 1e-6;
    int max_iters = 20000;
    std::uint64_t seed = 12345;
    double dtau_start = 0.1;
    double dtau_min = 1e-3;
    int extra_states = -1;

    Grid2D make_grid() const { return Grid2D::centered(grid, grid, extent); }
    SolverConfig solver() const;
};

struct StatsBlock {
    std::string ensemble = "auto";  // auto | goe | gue
    double l_max = 30.0;
    int bins = 40;
    std::string unfold = "auto";  // auto | thomas-fermi | polynomial

    /// auto resolves to GUE in a field and GOE without one.
    EnsembleKind resolve(double b) const;
    /// auto picks the power-law staircase model for solver spectra and the
    /// generic polynomial for synthetic sources.
    UnfoldMethod method_for(const std::string& source, double well_exponent) const;
};

struct SweepBlock {
    bool present = false;
    std::vector<double> m_values;
    std::vector<double> sigma_values;
    std::vector<std::uint64_t> seeds;
};

struct SubspecBlock {
    int state = 0;
    double window = 15.0;
    int k_max = 4;
    std::vector<ResonanceLabel> resonances{ResonanceLabel(5, 2)};
};

struct DosBlock {
    DOSAxes axes;
};

/// Parsed run configuration.  The grammar is a TOML subset: [section] headers,
/// bare keys, `key = value` with numbers, booleans, quoted strings, and
/// single-line arrays; '#' starts a comment.  Unknown sections or keys are
/// rejected, and every block's preconditions are checked at parse time.
struct RunConfig {
    PotentialSpec potential;  // [potential] n/omega0 merged with [bumps]
    FieldBlock field;
    SolverBlock solver;
    StatsBlock stats;
    SweepBlock sweep;
    SubspecBlock subspec;
    DosBlock dos;
    std::string text;  // raw file content, the hash input

    static RunConfig from_text(const std::string& text);
    static RunConfig from_file(const std::string& path);
};

}  // namespace scarlab
