#include <complex>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include <cblas.h>
#include <lapacke.h>

#include "scarlab/fft.hpp"
#include "scarlab/subspectrum.hpp"

namespace scarlab {

namespace {

using cplx = std::complex<double>;

// Serial left-conjugated dot under the cell measure; fixed summation order.
cplx dot_cell(const std::vector<cplx>& a, const std::vector<cplx>& b, double cell) {
    cplx acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
    return acc * cell;
}

double grid_norm(const std::vector<cplx>& a, double cell) {
    double acc = 0.0;
    for (const cplx& v : a) acc += std::norm(v);
    return std::sqrt(acc * cell);
}

// Mean level spacing around e_center, degeneracies counted, from a sorted list.
double local_mean_spacing(const std::vector<double>& es, double e_center) {
    require(es.size() >= 2, ErrorCode::SpectrumTooShort,
            "need at least two levels to set a spacing scale");
    auto it = std::lower_bound(es.begin(), es.end(), e_center);
    std::ptrdiff_t idx = it - es.begin();
    std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, idx - 25);
    std::ptrdiff_t hi = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(es.size()) - 1,
                                                 idx + 25);
    double span = es[hi] - es[lo];
    require(span > 0.0, ErrorCode::SeriesDegenerate,
            "levels around the window center are all degenerate");
    return span / static_cast<double>(hi - lo);
}

// L_z = -i (x d_y - y d_x) with spectral derivatives (Nyquist modes dropped,
// matching the Hamiltonian's first-derivative convention).
std::vector<cplx> apply_angular_momentum(const Grid2D& g, const std::vector<cplx>& in) {
    const int nx = g.nx, ny = g.ny;
    const std::size_t n = g.size();
    const double lx = g.x1 - g.x0, ly = g.y1 - g.y0;
    const double inv_n = 1.0 / (static_cast<double>(nx) * ny);

    fft::aligned_vector<cplx> ddx(n), ddy(n);
    std::copy(in.begin(), in.end(), ddx.begin());
    fft::forward_2d(nx, ny, ddx.data());
    std::copy(ddx.begin(), ddx.end(), ddy.begin());
    for (int i = 0; i < nx; ++i) {
        double kx = fft::wavenumber(i, nx, lx);
        if (nx % 2 == 0 && i == nx / 2) kx = 0.0;
        for (int j = 0; j < ny; ++j) {
            double ky = fft::wavenumber(j, ny, ly);
            if (ny % 2 == 0 && j == ny / 2) ky = 0.0;
            const std::size_t m = g.idx(i, j);
            ddx[m] *= cplx(0.0, kx * inv_n);
            ddy[m] *= cplx(0.0, ky * inv_n);
        }
    }
    fft::inverse_2d(nx, ny, ddx.data());
    fft::inverse_2d(nx, ny, ddy.data());

    std::vector<cplx> out(n);
    for (int i = 0; i < nx; ++i) {
        const double x = g.x(i);
        for (int j = 0; j < ny; ++j) {
            const double y = g.y(j);
            const std::size_t m = g.idx(i, j);
            out[m] = cplx(0.0, -1.0) * (x * ddy[m] - y * ddx[m]);
        }
    }
    return out;
}

struct Labeled {
    FDLabel label;
    double energy = 0.0;
    std::vector<cplx> values;
};

// Rotate each degenerate cluster of a solved set into angular-momentum
// eigenstates and read the labels off the L_z eigenvalues.
std::vector<Labeled> recombine_clusters(const Grid2D& grid, EigenSet&& es) {
    const double cell = grid.cell_area();
    const std::size_t kk = es.energies.size();
    const std::size_t n = grid.size();
    std::vector<Labeled> out(kk);

    std::size_t i0 = 0;
    while (i0 < kk) {
        std::size_t i1 = i0 + 1;
        while (i1 < kk && es.energies[i1] - es.energies[i1 - 1] < 1e-6) ++i1;
        const std::size_t c = i1 - i0;

        std::vector<std::vector<cplx>> lz(c);
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t s = 0; s < static_cast<std::ptrdiff_t>(c); ++s)
            lz[s] = apply_angular_momentum(grid, es.states[i0 + s]);

        std::vector<cplx> a(c * c);
        for (std::size_t r = 0; r < c; ++r)
            for (std::size_t s = 0; s < c; ++s)
                a[r * c + s] = dot_cell(es.states[i0 + r], lz[s], cell);

        std::vector<double> lam(c);
        int info = LAPACKE_zheevd(LAPACK_ROW_MAJOR, 'V', 'L', static_cast<int>(c), a.data(),
                                  static_cast<int>(c), lam.data());
        require(info == 0, ErrorCode::NonConvergence,
                "angular-momentum diagonalization failed inside a degenerate cluster");

        for (std::size_t j = 0; j < c; ++j) {
            const long l = -std::lround(lam[j]);
            if (std::abs(lam[j] + static_cast<double>(l)) > 0.05) {
                char msg[160];
                std::snprintf(msg, sizeof msg,
                              "angular recombination gave non-integer momentum %.4f near E=%.6f",
                              lam[j], es.energies[i0]);
                fail(ErrorCode::NonConvergence, msg);
            }
            std::vector<cplx> phi(n, cplx(0.0, 0.0));
            double energy = 0.0;
            for (std::size_t r = 0; r < c; ++r) {
                const cplx u = a[r * c + j];
                energy += std::norm(u) * es.energies[i0 + r];
                const std::vector<cplx>& src = es.states[i0 + r];
                for (std::size_t m = 0; m < n; ++m) phi[m] += u * src[m];
            }
            double nrm = grid_norm(phi, cell);
            for (cplx& v : phi) v /= nrm;
            out[i0 + j] = Labeled{FDLabel{0, static_cast<int>(l)}, energy, std::move(phi)};
        }
        i0 = i1;
    }

    std::map<int, int> radial_count;
    for (Labeled& s : out) s.label.n_r = radial_count[s.label.l]++;
    return out;
}

std::vector<BasisState> harmonic_basis(const PotentialSpec& spec, const Grid2D& grid,
                                       double b_field, double e_center, double window_spacings,
                                       const std::vector<ResonanceLabel>& ladders, int k_max) {
    const double om = spec.omega0;
    const double omega_eff = std::sqrt(om * om + 0.25 * b_field * b_field);

    double e_cut = e_center + std::max(3.0 * omega_eff, 1.0);
    std::vector<FDLabel> levels = enumerate_fd_labels(om, b_field, e_cut);
    std::vector<double> es(levels.size());
    for (std::size_t i = 0; i < levels.size(); ++i)
        es[i] = fock_darwin_energy(levels[i], om, b_field);
    double dbar = local_mean_spacing(es, e_center);
    const double half = window_spacings * dbar;
    if (e_center + half > e_cut - dbar) {
        e_cut = e_center + half + 2.0 * dbar;
        levels = enumerate_fd_labels(om, b_field, e_cut);
    }

    std::map<FDLabel, double> chosen;
    std::vector<FDLabel> core;
    for (const FDLabel& label : levels) {
        double e = fock_darwin_energy(label, om, b_field);
        if (std::abs(e - e_center) <= half) {
            chosen.emplace(label, e);
            core.push_back(label);
        }
    }
    require(!core.empty(), ErrorCode::WindowTooShort,
            "no unperturbed levels fall inside the requested window");
    for (const FDLabel& anchor : core)
        for (const ResonanceLabel& res : ladders)
            for (const FDLabel& member : resonant_set(anchor, res, k_max).members)
                chosen.emplace(member, fock_darwin_energy(member, om, b_field));

    std::vector<BasisState> out;
    out.reserve(chosen.size());
    for (const auto& [label, e] : chosen) out.push_back(BasisState{label, e, {}});
    std::sort(out.begin(), out.end(), [](const BasisState& a, const BasisState& b) {
        return std::tie(a.energy, a.label.l, a.label.n_r) <
               std::tie(b.energy, b.label.l, b.label.n_r);
    });

    const double cell = grid.cell_area();
    // Exceptions must not cross the parallel region; capture the first one
    // (e.g. GridTooCoarse from the sampler) and rethrow after the join.
    std::exception_ptr sample_error;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(out.size()); ++i) {
        try {
            out[i].values = fock_darwin_state(out[i].label, om, b_field, grid);
        } catch (...) {
#pragma omp critical
            if (!sample_error) sample_error = std::current_exception();
        }
    }
    if (sample_error) std::rethrow_exception(sample_error);
    const std::set<FDLabel> core_set(core.begin(), core.end());
    std::vector<BasisState> kept;
    kept.reserve(out.size());
    for (BasisState& s : out) {
        double nrm = grid_norm(s.values, cell);
        if (std::abs(nrm - 1.0) > 0.02) {
            // A window member the grid cannot hold is a configuration error;
            // a ladder extension beyond the box is dropped, matching the
            // numeric path, which only extends over solved states.
            if (core_set.count(s.label)) {
                char msg[160];
                std::snprintf(msg, sizeof msg,
                              "basis state (n_r=%d, l=%d) is truncated by the grid (norm %.4f)",
                              s.label.n_r, s.label.l, nrm);
                fail(ErrorCode::GridTooSmall, msg);
            }
            continue;
        }
        for (cplx& v : s.values) v /= nrm;
        kept.push_back(std::move(s));
    }
    return kept;
}

std::vector<BasisState> numeric_basis(const PotentialSpec& spec, const Grid2D& grid,
                                      double b_field, double e_center, double window_spacings,
                                      const std::vector<ResonanceLabel>& ladders, int k_max,
                                      const SolverConfig& solver_cfg) {
    PotentialSpec bare = spec;
    bare.M = 0.0;

    const double de = std::max(1e-3, 0.01 * e_center);
    const double rho = (semiclassical_count(bare, e_center + de) -
                        semiclassical_count(bare, e_center - de)) /
                       (2.0 * de);
    require(rho > 0.0, ErrorCode::DomainError, "level density vanishes at the window center");
    const double dbar_est = 1.0 / rho;
    const double e_top = e_center + (window_spacings + 10.0) * dbar_est;
    const int k_need = static_cast<int>(std::ceil(semiclassical_count(bare, e_top))) + 10;

    SolverConfig cfg = solver_cfg;
    cfg.k = k_need;
    cfg.validate();
    PotentialGrid pot = build_potential_grid(bare, grid);
    std::vector<Labeled> labeled = recombine_clusters(grid, solve_itp(pot, b_field, cfg));

    std::vector<double> es(labeled.size());
    for (std::size_t i = 0; i < labeled.size(); ++i) es[i] = labeled[i].energy;
    const double dbar = local_mean_spacing(es, e_center);
    const double half = window_spacings * dbar;

    std::map<FDLabel, std::size_t> index;
    for (std::size_t i = 0; i < labeled.size(); ++i) index.emplace(labeled[i].label, i);

    std::vector<char> pick(labeled.size(), 0);
    std::vector<FDLabel> core;
    for (std::size_t i = 0; i < labeled.size(); ++i)
        if (std::abs(labeled[i].energy - e_center) <= half) {
            pick[i] = 1;
            core.push_back(labeled[i].label);
        }
    require(!core.empty(), ErrorCode::WindowTooShort,
            "no unperturbed levels fall inside the requested window");
    for (const FDLabel& anchor : core)
        for (const ResonanceLabel& res : ladders)
            for (const FDLabel& member : resonant_set(anchor, res, k_max).members) {
                auto it = index.find(member);
                if (it != index.end()) pick[it->second] = 1;
            }

    std::vector<BasisState> out;
    for (std::size_t i = 0; i < labeled.size(); ++i)
        if (pick[i])
            out.push_back(BasisState{labeled[i].label, labeled[i].energy,
                                     std::move(labeled[i].values)});
    std::stable_sort(out.begin(), out.end(), [](const BasisState& a, const BasisState& b) {
        return std::tie(a.energy, a.label.l, a.label.n_r) <
               std::tie(b.energy, b.label.l, b.label.n_r);
    });
    return out;
}

}  // namespace

bool ResonantSet::contains(const FDLabel& label) const {
    return std::find(members.begin(), members.end(), label) != members.end();
}

ResonantSet resonant_set(const FDLabel& anchor, const ResonanceLabel& res, int k_max) {
    require(anchor.n_r >= 0, ErrorCode::ConfigError, "anchor radial index must be non-negative");
    require(res.v_theta > 0 && res.v_r > 0, ErrorCode::ConfigError,
            "resonance indices must be positive");
    require(k_max >= 0, ErrorCode::ConfigError, "ladder half-length must be non-negative");

    ResonantSet set;
    set.anchor = anchor;
    set.resonance = res;
    for (int k = -k_max; k <= k_max; ++k) {
        FDLabel member{anchor.n_r + k * res.v_r, anchor.l - k * res.v_theta};
        if (member.n_r >= 0) set.members.push_back(member);
    }
    return set;
}

Subspectrum overlaps(const std::vector<std::complex<double>>& state, const Grid2D& grid,
                     const std::vector<BasisState>& basis, double tol) {
    grid.validate();
    require(tol > 0.0, ErrorCode::ConfigError, "tolerance must be positive");
    require(!basis.empty(), ErrorCode::ConfigError, "basis must not be empty");
    require(state.size() == grid.size(), ErrorCode::GridMismatch,
            "state length does not match the grid");
    for (const BasisState& b : basis)
        require(b.values.size() == grid.size(), ErrorCode::GridMismatch,
                "basis state length does not match the grid");

    const std::size_t nb = basis.size();
    const std::size_t n = grid.size();
    const double cell = grid.cell_area();

    std::vector<cplx> pack(nb * n);
    for (std::size_t m = 0; m < nb; ++m)
        std::copy(basis[m].values.begin(), basis[m].values.end(), pack.begin() + m * n);
    std::vector<cplx> gram(nb * nb);
    const cplx one(1.0, 0.0), zero(0.0, 0.0);
    cblas_zgemm(CblasRowMajor, CblasNoTrans, CblasConjTrans, static_cast<int>(nb),
                static_cast<int>(nb), static_cast<int>(n), &one, pack.data(),
                static_cast<int>(n), pack.data(), static_cast<int>(n), &zero, gram.data(),
                static_cast<int>(nb));
    double worst = 0.0;
    for (std::size_t i = 0; i < nb; ++i)
        for (std::size_t j = 0; j < nb; ++j) {
            cplx v = gram[i * nb + j] * cell;
            if (i == j) v -= 1.0;
            worst = std::max(worst, std::abs(v));
        }
    if (worst > 10.0 * tol) {
        char msg[128];
        std::snprintf(msg, sizeof msg, "basis deviates from orthonormality by %.3e (allowed %.3e)",
                      worst, 10.0 * tol);
        fail(ErrorCode::BasisNotOrthonormal, msg);
    }

    std::vector<cplx> coeff(nb);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t m = 0; m < static_cast<std::ptrdiff_t>(nb); ++m) {
        const cplx* p = basis[m].values.data();
        cplx acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += std::conj(p[i]) * state[i];
        coeff[m] = acc * cell;
    }

    Subspectrum out;
    out.weights.reserve(nb);
    double total = 0.0;
    for (std::size_t m = 0; m < nb; ++m) {
        WeightEntry e;
        e.m = m;
        e.label = basis[m].label;
        e.energy = basis[m].energy;
        e.coeff = coeff[m];
        e.weight = std::norm(coeff[m]);
        total += e.weight;
        out.weights.push_back(e);
    }
    out.completeness = total;
    std::stable_sort(out.weights.begin(), out.weights.end(),
                     [](const WeightEntry& a, const WeightEntry& b) { return a.energy < b.energy; });
    return out;
}

ScarStrength scar_strength(const Subspectrum& sub, const ResonantSet& set) {
    if (!sub.complete()) {
        char msg[128];
        std::snprintf(msg, sizeof msg, "expansion captures only %.4f of the state (need 0.99)",
                      sub.completeness);
        fail(ErrorCode::IncompleteExpansion, msg);
    }
    ScarStrength s;
    double sumsq = 0.0;
    for (const WeightEntry& e : sub.weights) {
        sumsq += e.weight * e.weight;
        if (set.contains(e.label)) s.set_weight += e.weight;
    }
    s.participation = 1.0 / sumsq;
    return s;
}

std::pair<ResonantSet, double> best_resonant_set(const Subspectrum& sub,
                                                 const std::vector<ResonanceLabel>& candidates,
                                                 int k_max) {
    require(!candidates.empty(), ErrorCode::ConfigError,
            "need at least one candidate resonance");
    if (!sub.complete()) {
        char msg[128];
        std::snprintf(msg, sizeof msg, "expansion captures only %.4f of the state (need 0.99)",
                      sub.completeness);
        fail(ErrorCode::IncompleteExpansion, msg);
    }

    bool have = false;
    ResonantSet best;
    double best_weight = 0.0;
    int best_vsum = 0;
    double best_anchor_e = 0.0;
    for (const WeightEntry& entry : sub.weights) {
        for (const ResonanceLabel& res : candidates) {
            ResonantSet set = resonant_set(entry.label, res, k_max);
            double w = 0.0;
            for (const WeightEntry& e : sub.weights)
                if (set.contains(e.label)) w += e.weight;
            const int vsum = res.v_theta + res.v_r;
            bool better;
            if (!have)
                better = true;
            else if (w != best_weight)
                better = w > best_weight;
            else if (vsum != best_vsum)
                better = vsum < best_vsum;
            else
                better = entry.energy < best_anchor_e;
            if (better) {
                have = true;
                best = std::move(set);
                best_weight = w;
                best_vsum = vsum;
                best_anchor_e = entry.energy;
            }
        }
    }
    return {best, best_weight};
}

std::vector<BasisState> build_unperturbed_basis(const PotentialSpec& spec, const Grid2D& grid,
                                                double b_field, double e_center,
                                                double window_spacings,
                                                const std::vector<ResonanceLabel>& ladders,
                                                int k_max, const SolverConfig& solver_cfg) {
    spec.validate();
    grid.validate();
    require(window_spacings > 0.0, ErrorCode::ConfigError, "window width must be positive");
    require(k_max >= 0, ErrorCode::ConfigError, "ladder half-length must be non-negative");
    for (const ResonanceLabel& res : ladders)
        require(res.v_theta > 0 && res.v_r > 0, ErrorCode::ConfigError,
                "resonance indices must be positive");

    if (spec.n == 2.0)
        return harmonic_basis(spec, grid, b_field, e_center, window_spacings, ladders, k_max);
    require(e_center > 0.0, ErrorCode::ConfigError, "window center must be positive");
    return numeric_basis(spec, grid, b_field, e_center, window_spacings, ladders, k_max,
                         solver_cfg);
}

}  // namespace scarlab
