#include <complex>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <cblas.h>

#include "scarlab/serial_ref.hpp"

namespace scarlab::serial_ref {

using cplx = std::complex<double>;

PotentialGrid build_potential_grid(const PotentialSpec& spec, const Grid2D& grid,
                                   const BumpField& bumps) {
    grid.validate();
    PotentialGrid out;
    out.grid = grid;
    out.v.resize(grid.size());
    for (int i = 0; i < grid.nx; ++i) {
        double xv = grid.x(i);
        for (int j = 0; j < grid.ny; ++j) {
            double yv = grid.y(j);
            out.v[grid.idx(i, j)] =
                eval_external_potential(spec, xv, yv) + eval_perturbation(bumps, xv, yv);
        }
    }
    return out;
}

Delta3Curve delta3(const UnfoldedSpectrum& unfolded, const std::vector<double>& l_values) {
    require(!l_values.empty(), ErrorCode::ConfigError, "no L values requested");
    for (double l : l_values)
        require(l > 0.0 && l <= 30.0, ErrorCode::DomainError,
                "rigidity length must lie in (0, 30]");
    require(unfolded.window_size() >= 4, ErrorCode::WindowTooShort, "window too short");

    const double* lev = unfolded.levels.data();
    const auto lo = unfolded.window_lo;
    const auto hi = unfolded.window_hi;
    double eps_start = lev[lo];
    double eps_end = lev[hi - 1];

    Delta3Curve curve;
    curve.l_values = l_values;
    curve.delta3.assign(l_values.size(), 0.0);
    curve.window_counts.assign(l_values.size(), 0);

    for (std::ptrdiff_t il = 0; il < static_cast<std::ptrdiff_t>(l_values.size()); ++il) {
        double L = l_values[il];
        double stride = 0.25 * L;
        double acc = 0.0;
        std::size_t n_windows = 0;
        for (double w0 = eps_start; w0 + L <= eps_end + 1e-12; w0 += stride) {
            double w1 = w0 + L;
            double center = 0.5 * (w0 + w1);
            double h = 0.5 * L;
            auto first = std::lower_bound(lev + lo, lev + hi, w0);
            auto last = std::upper_bound(lev + lo, lev + hi, w1);
            double s0 = 0.0, s1 = 0.0, s2 = 0.0;
            double prev = -h;
            double m = 0.0;
            for (auto it = first; it != last; ++it) {
                double u = std::clamp(*it - center, -h, h);
                s0 += m * (u - prev);
                s1 += 0.5 * m * (u * u - prev * prev);
                s2 += m * m * (u - prev);
                prev = u;
                m += 1.0;
            }
            s0 += m * (h - prev);
            s1 += 0.5 * m * (h * h - prev * prev);
            s2 += m * m * (h - prev);
            double i0 = L;
            double i2 = L * L * L / 12.0;
            double resid = s2 - s0 * s0 / i0 - s1 * s1 / i2;
            acc += std::max(resid, 0.0) / L;
            ++n_windows;
        }
        if (n_windows > 0) curve.delta3[il] = acc / n_windows;
        curve.window_counts[il] = n_windows;
    }
    for (std::size_t il = 0; il < l_values.size(); ++il)
        require(curve.window_counts[il] >= 1, ErrorCode::WindowTooShort,
                "no complete window for L = " + std::to_string(l_values[il]));
    return curve;
}

DOSMap dos_map(double omega0, const DOSAxes& axes) {
    require(axes.window > 0.0, ErrorCode::ConfigError, "window must be positive");
    require(axes.b_step > 0.0 && axes.e_step > 0.0, ErrorCode::ConfigError,
            "axis steps must be positive");
    require(axes.b_stop >= axes.b_start && axes.e_stop >= axes.e_start, ErrorCode::ConfigError,
            "axis ranges must be non-empty");

    DOSMap map;
    for (double b = axes.b_start; b <= axes.b_stop + 1e-12; b += axes.b_step)
        map.b_axis.push_back(b);
    std::size_t ne = static_cast<std::size_t>(
        std::floor((axes.e_stop - axes.e_start) / axes.e_step + 1e-12)) + 1;
    map.e_axis.resize(ne);
    for (std::size_t ie = 0; ie < ne; ++ie) map.e_axis[ie] = axes.e_start + ie * axes.e_step;

    map.density.assign(map.b_axis.size() * ne, 0.0);
    double w = axes.window;
    double norm = 1.0 / (w * std::sqrt(2.0 * M_PI));
    double margin = 5.0 * w;

    for (std::ptrdiff_t ib = 0; ib < static_cast<std::ptrdiff_t>(map.b_axis.size()); ++ib) {
        double b = map.b_axis[ib];
        auto labels = enumerate_fd_labels(omega0, b, axes.e_stop + margin);
        double* row = &map.density[ib * ne];
        for (const auto& label : labels) {
            double e = fock_darwin_energy(label, omega0, b);
            auto lo = static_cast<std::ptrdiff_t>(
                std::ceil((e - margin - axes.e_start) / axes.e_step));
            auto hi = static_cast<std::ptrdiff_t>(
                std::floor((e + margin - axes.e_start) / axes.e_step));
            lo = std::max<std::ptrdiff_t>(lo, 0);
            hi = std::min<std::ptrdiff_t>(hi, static_cast<std::ptrdiff_t>(ne) - 1);
            for (std::ptrdiff_t ie = lo; ie <= hi; ++ie) {
                double d = (map.e_axis[ie] - e) / w;
                row[ie] += norm * std::exp(-0.5 * d * d);
            }
        }
    }
    return map;
}

Subspectrum overlaps(const std::vector<cplx>& state, const Grid2D& grid,
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

}  // namespace scarlab::serial_ref
