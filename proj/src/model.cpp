#include "scarlab/model.hpp"

#include <cmath>

#include "scarlab/rng.hpp"

namespace scarlab {

double eval_external_potential(const PotentialSpec& spec, double x, double y) {
    double r = std::hypot(x, y);
    return 0.5 * spec.omega0 * spec.omega0 * std::pow(r, spec.n);
}

double turning_radius(const PotentialSpec& spec, double e) {
    require(e >= 0.0, ErrorCode::DomainError, "turning radius needs non-negative energy");
    return std::pow(2.0 * e / (spec.omega0 * spec.omega0), 1.0 / spec.n);
}

// Phase-space volume of {p^2/2 + V_ext <= e} over (2 pi)^2.  For V = c r^n
// with c = omega0^2/2 this integrates to e^(1+2/n) * n/(n+2) * (e/c)^(2/n) / (2 e) ...
// evaluated directly below via the closed form N(e) = (n/(2n+4)) * r_t^2 * e * 2/(... )
// kept in the generic integral form for clarity.
double semiclassical_count(const PotentialSpec& spec, double e) {
    if (e <= 0.0) return 0.0;
    double rt = turning_radius(spec, e);
    // N(e) = (1/2pi) * Integral_0^rt 2 pi r * (e - V(r)) dr  (area form, hbar = m = 1)
    //      = e rt^2/2 - (omega0^2/2) rt^(n+2)/(n+2)
    double c = 0.5 * spec.omega0 * spec.omega0;
    return e * rt * rt / 2.0 - c * std::pow(rt, spec.n + 2.0) / (spec.n + 2.0);
}

double semiclassical_energy(const PotentialSpec& spec, double count) {
    require(count >= 0.0, ErrorCode::DomainError, "state count must be non-negative");
    if (count == 0.0) return 0.0;
    double lo = 0.0, hi = 1.0;
    while (semiclassical_count(spec, hi) < count) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        (semiclassical_count(spec, mid) < count ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

Region default_bump_region(const PotentialSpec& spec, double e_max) {
    double half = turning_radius(spec, e_max) + 2.0 * spec.sigma;
    return Region{-half, half, -half, half};
}

BumpField generate_bumps(const PotentialSpec& spec, const Region& region) {
    spec.validate();
    require(region.x1 > region.x0 && region.y1 > region.y0, ErrorCode::DomainError,
            "bump region must have positive area");
    auto count = static_cast<std::size_t>(std::llround(spec.density * region.area()));
    BumpField field;
    field.M = spec.M;
    field.sigma = spec.sigma;
    field.centers.reserve(count);
    Xoshiro256ss rng(spec.seed);
    for (std::size_t i = 0; i < count; ++i) {
        double x = rng.uniform(region.x0, region.x1);
        double y = rng.uniform(region.y0, region.y1);
        field.centers.push_back({x, y});
    }
    return field;
}

double eval_perturbation(const BumpField& bumps, double x, double y) {
    if (bumps.M == 0.0 || bumps.centers.empty()) return 0.0;
    double inv2s2 = 1.0 / (2.0 * bumps.sigma * bumps.sigma);
    double sum = 0.0;
    for (const auto& b : bumps.centers) {
        double ddx = x - b.x;
        double ddy = y - b.y;
        sum += std::exp(-(ddx * ddx + ddy * ddy) * inv2s2);
    }
    return bumps.M * sum;
}

PotentialGrid build_potential_grid(const PotentialSpec& spec, const Grid2D& grid,
                                   const BumpField& bumps) {
    grid.validate();
    PotentialGrid out;
    out.grid = grid;
    out.v.resize(grid.size());
#pragma omp parallel for schedule(static)
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

PotentialGrid build_potential_grid(const PotentialSpec& spec, const Grid2D& grid) {
    double e_edge = eval_external_potential(spec, grid.half_extent_x(), 0.0);
    BumpField bumps = generate_bumps(spec, default_bump_region(spec, e_edge));
    return build_potential_grid(spec, grid, bumps);
}

}  // namespace scarlab
