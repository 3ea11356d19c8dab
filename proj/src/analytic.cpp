#include "scarlab/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace scarlab {

ResonanceLabel::ResonanceLabel(int vtheta, int vr) {
    require(vtheta > 0 && vr > 0, ErrorCode::DomainError, "resonance indices must be positive");
    int g = std::gcd(vtheta, vr);
    v_theta = vtheta / g;
    v_r = vr / g;
}

double fock_darwin_energy(const FDLabel& label, double omega0, double b_field) {
    require(label.n_r >= 0, ErrorCode::DomainError, "radial index must be non-negative");
    double omega = std::sqrt(omega0 * omega0 + 0.25 * b_field * b_field);
    return (2.0 * label.n_r + std::abs(label.l) + 1.0) * omega - 0.5 * label.l * b_field;
}

std::vector<FDLabel> enumerate_fd_labels(double omega0, double b_field, double e_cut) {
    std::vector<FDLabel> out;
    double omega = std::sqrt(omega0 * omega0 + 0.25 * b_field * b_field);
    // Energy grows in every direction: the cost per unit |l| is at least
    // omega - |B|/2 > 0, so a single l bound covers both signs.
    if (e_cut < omega) return out;
    int l_max = static_cast<int>(std::floor((e_cut - omega) / (omega - 0.5 * std::abs(b_field))));
    for (int l = -l_max; l <= l_max; ++l) {
        for (int n_r = 0;; ++n_r) {
            FDLabel label{n_r, l};
            if (fock_darwin_energy(label, omega0, b_field) > e_cut) break;
            out.push_back(label);
        }
    }
    std::sort(out.begin(), out.end(), [&](const FDLabel& a, const FDLabel& b) {
        double ea = fock_darwin_energy(a, omega0, b_field);
        double eb = fock_darwin_energy(b, omega0, b_field);
        if (ea != eb) return ea < eb;
        if (a.l != b.l) return a.l < b.l;
        return a.n_r < b.n_r;
    });
    return out;
}

double resonance_field(const ResonanceLabel& label) {
    double rho = label.ratio();
    require(rho > 1.0, ErrorCode::DomainError,
            "resonance condition requires v_r/v_theta > 1");
    return (rho - 2.0) / std::sqrt(rho - 1.0);
}

std::vector<std::complex<double>> fock_darwin_state(const FDLabel& label, double omega0,
                                                    double b_field, const Grid2D& grid) {
    require(label.n_r >= 0, ErrorCode::DomainError, "radial index must be non-negative");
    grid.validate();
    double omega = std::sqrt(omega0 * omega0 + 0.25 * b_field * b_field);
    double osc_len = 1.0 / std::sqrt(omega);
    require(osc_len >= 4.0 * std::max(grid.dx(), grid.dy()), ErrorCode::GridTooCoarse,
            "oscillator length under four grid spacings");

    int n_r = label.n_r;
    int al = std::abs(label.l);
    double alpha = al;

    std::vector<std::complex<double>> psi(grid.size());
    // log Gamma(alpha + 1) for the k = 0 normalized Laguerre value.
    double lg = std::lgamma(alpha + 1.0);

    for (int i = 0; i < grid.nx; ++i) {
        double x = grid.x(i);
        for (int j = 0; j < grid.ny; ++j) {
            double y = grid.y(j);
            double r2 = x * x + y * y;
            double u = omega * r2;
            // Normalized recurrence g_k = sqrt(k!/Gamma(k+alpha+1)) L_k^alpha(u):
            // g_{k+1} = [(2k+1+alpha-u) g_k - sqrt(k(k+alpha)) g_{k-1}] / sqrt((k+1)(k+1+alpha))
            double gkm1 = 0.0;
            double gk = std::exp(-0.5 * lg);
            for (int k = 0; k < n_r; ++k) {
                double gkp1 = ((2.0 * k + 1.0 + alpha - u) * gk -
                               std::sqrt(static_cast<double>(k) * (k + alpha)) * gkm1) /
                              std::sqrt((k + 1.0) * (k + 1.0 + alpha));
                gkm1 = gk;
                gk = gkp1;
            }
            // Radial amplitude u^{|l|/2} e^{-u/2} assembled in log space to
            // avoid overflow at large |l| and u.
            double amp;
            if (u > 0.0) {
                amp = std::exp(0.5 * alpha * std::log(u) - 0.5 * u);
            } else {
                amp = (al == 0) ? 1.0 : 0.0;
            }
            double radial = std::sqrt(omega / M_PI) * amp * gk;
            double theta = std::atan2(y, x);
            // e^{-i l theta}: the sign pairs with the -l B/2 term in the energy.
            psi[grid.idx(i, j)] = radial * std::complex<double>(std::cos(label.l * theta),
                                                               -std::sin(label.l * theta));
        }
    }
    return psi;
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
    // Labels enumerated to the cutoff plus a 5-window margin so edge Gaussians
    // are complete; contributions restricted to +-5 w around each level.
    double margin = 5.0 * w;

#pragma omp parallel for schedule(static)
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

}  // namespace scarlab
