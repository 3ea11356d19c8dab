#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>

#include "scarlab/stats.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <functional>

#include "scarlab/rng.hpp"

namespace scarlab {

const char* ensemble_name(EnsembleKind kind) {
    switch (kind) {
        case EnsembleKind::Poisson: return "Poisson";
        case EnsembleKind::GOE: return "GOE";
        case EnsembleKind::GUE: return "GUE";
    }
    return "?";
}

SpacingHistogram nnls_histogram(const std::vector<double>& spacings, int bins) {
    require(!spacings.empty(), ErrorCode::SeriesTooShort, "no spacings to histogram");
    require(bins >= 1, ErrorCode::ConfigError, "need at least one bin");
    double s_max = *std::max_element(spacings.begin(), spacings.end());
    require(s_max > 0.0, ErrorCode::SeriesDegenerate, "all spacings are zero");

    SpacingHistogram hist;
    hist.edges.resize(bins + 1);
    for (int k = 0; k <= bins; ++k) hist.edges[k] = s_max * k / bins;
    std::vector<std::size_t> counts(bins, 0);
    for (double s : spacings) {
        int k = std::min(static_cast<int>(s / s_max * bins), bins - 1);
        counts[k]++;
    }
    double width = s_max / bins;
    hist.density.resize(bins);
    for (int k = 0; k < bins; ++k)
        hist.density[k] = counts[k] / (width * static_cast<double>(spacings.size()));
    return hist;
}

double wigner_surmise(EnsembleKind kind, double s) {
    require(s >= 0.0, ErrorCode::DomainError, "spacing must be non-negative");
    switch (kind) {
        case EnsembleKind::Poisson:
            return std::exp(-s);
        case EnsembleKind::GOE:
            return 0.5 * M_PI * s * std::exp(-0.25 * M_PI * s * s);
        case EnsembleKind::GUE:
            return (32.0 / (M_PI * M_PI)) * s * s * std::exp(-4.0 * s * s / M_PI);
    }
    return 0.0;
}

double berry_robnik_pdf(double q, double s) {
    require(q >= 0.0 && q <= 1.0, ErrorCode::DomainError, "regular fraction must be in [0, 1]");
    require(s >= 0.0, ErrorCode::DomainError, "spacing must be non-negative");
    double p = 1.0 - q;  // chaotic fraction
    double root_pi = std::sqrt(M_PI);
    double term1 = q * q * std::erfc(0.5 * root_pi * p * s);
    double term2 = (2.0 * q * p + 0.5 * M_PI * p * p * p * s) *
                   std::exp(-0.25 * M_PI * p * p * s * s);
    return std::exp(-q * s) * (term1 + term2);
}

namespace {

// Minimize a smooth one-dimensional objective on [0, 1]: coarse scan followed
// by golden-section refinement around the best grid point.
double minimize_unit_interval(const std::function<double(double)>& f, double* value_out) {
    const int grid = 400;
    double best_x = 0.0, best_f = f(0.0);
    for (int i = 1; i <= grid; ++i) {
        double x = static_cast<double>(i) / grid;
        double fx = f(x);
        if (fx < best_f) {
            best_f = fx;
            best_x = x;
        }
    }
    double lo = std::max(0.0, best_x - 1.0 / grid);
    double hi = std::min(1.0, best_x + 1.0 / grid);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 60; ++it) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    double x = 0.5 * (a + b);
    double fx = f(x);
    if (best_f < fx) {
        x = best_x;
        fx = best_f;
    }
    if (value_out) *value_out = fx;
    return x;
}

}  // namespace

MixingResult fit_q(const std::vector<double>& spacings) {
    require(spacings.size() >= 50, ErrorCode::SeriesTooShort,
            "Berry-Robnik fit needs at least 50 spacings");
    auto neg_log_lik = [&](double q) {
        double acc = 0.0;
        for (double s : spacings) {
            double p = berry_robnik_pdf(q, s);
            acc -= std::log(std::max(p, 1e-300));
        }
        return acc / spacings.size();
    };
    MixingResult res;
    res.estimate = minimize_unit_interval(neg_log_lik, &res.residual);
    res.ensemble = EnsembleKind::GOE;
    res.detail = "berry-robnik-mle";
    return res;
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

#pragma omp parallel for schedule(dynamic)
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
            // Exact piecewise integration of the centered staircase m(u) over
            // [-h, h]: S0 = Int m, S1 = Int m u, S2 = Int m^2, then the
            // least-squares line residual in closed form.
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

double delta3_reference(EnsembleKind kind, double l) {
    require(l > 0.0, ErrorCode::DomainError, "rigidity length must be positive");
    switch (kind) {
        case EnsembleKind::Poisson:
            return l / 15.0;
        case EnsembleKind::GOE:
            return std::log(l) / (M_PI * M_PI) - 0.007;
        case EnsembleKind::GUE:
            return std::log(l) / (2.0 * M_PI * M_PI) + 0.058;
    }
    return 0.0;
}

namespace {

// Chaotic-branch rigidity used inside the Q fit.  The asymptotic log forms
// diverge as L -> 0, so below l_min they are replaced by a linear ramp through
// the origin that meets the asymptote continuously at l_min.
double chaotic_branch(EnsembleKind kind, double l) {
    constexpr double l_min = 1.0;
    if (l <= 0.0) return 0.0;
    if (l < l_min) return l * delta3_reference(kind, l_min) / l_min;
    return delta3_reference(kind, l);
}

}  // namespace

MixingResult fit_Q(const Delta3Curve& curve, EnsembleKind chaotic) {
    require(chaotic != EnsembleKind::Poisson, ErrorCode::ConfigError,
            "chaotic reference must be GOE or GUE");
    require(curve.l_values.size() >= 3, ErrorCode::WindowTooShort,
            "Q fit needs at least three rigidity points");
    auto sum_sq = [&](double Q) {
        double acc = 0.0;
        for (std::size_t i = 0; i < curve.l_values.size(); ++i) {
            double L = curve.l_values[i];
            double model = Q * L / 15.0 + chaotic_branch(chaotic, (1.0 - Q) * L);
            double d = model - curve.delta3[i];
            acc += d * d;
        }
        return acc;
    };
    MixingResult res;
    double sq = 0.0;
    res.estimate = minimize_unit_interval(sum_sq, &sq);
    res.residual = std::sqrt(sq / curve.l_values.size());
    res.ensemble = chaotic;
    res.detail = "delta3-mixing-lsq; small-L chaotic branch: linear ramp matched at L=1";
    return res;
}

MixingResult dfa_alpha(const std::vector<double>& spacings) {
    const std::size_t n = spacings.size();
    require(n >= 500, ErrorCode::SeriesTooShort,
            "detrended fluctuation analysis needs at least 500 spacings");

    std::vector<double> profile(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += spacings[i] - 1.0;
        profile[i] = acc;
    }

    // Log-spaced box sizes in [4, n/4].
    const int target_boxes = 20;
    std::vector<std::size_t> sizes;
    double lo = std::log(4.0), hi = std::log(n / 4.0);
    for (int k = 0; k < target_boxes; ++k) {
        auto size = static_cast<std::size_t>(
            std::llround(std::exp(lo + (hi - lo) * k / (target_boxes - 1))));
        if (sizes.empty() || size > sizes.back()) sizes.push_back(size);
    }
    require(sizes.size() >= 12, ErrorCode::SeriesTooShort,
            "series too short for 12 distinct box sizes");

    std::vector<double> log_n, log_f;
    for (std::size_t box : sizes) {
        std::size_t m = n / box;
        double sq_sum = 0.0;
        std::size_t segments = 0;
        // Segments taken from both ends so the trailing remainder still
        // contributes.
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t seg = 0; seg < m; ++seg) {
                std::size_t start = pass == 0 ? seg * box : n - (seg + 1) * box;
                // Closed-form least-squares line over k = 0..box-1.
                double sy = 0.0, sky = 0.0;
                for (std::size_t k = 0; k < box; ++k) {
                    double yv = profile[start + k];
                    sy += yv;
                    sky += k * yv;
                }
                double b = static_cast<double>(box);
                double sk = 0.5 * b * (b - 1.0);
                double skk = (b - 1.0) * b * (2.0 * b - 1.0) / 6.0;
                double det = b * skk - sk * sk;
                double slope = (b * sky - sk * sy) / det;
                double icept = (sy - slope * sk) / b;
                double resid = 0.0;
                for (std::size_t k = 0; k < box; ++k) {
                    double d = profile[start + k] - (slope * k + icept);
                    resid += d * d;
                }
                sq_sum += resid / b;
                ++segments;
            }
        }
        double f = std::sqrt(sq_sum / segments);
        if (f > 0.0) {
            log_n.push_back(std::log(static_cast<double>(box)));
            log_f.push_back(std::log(f));
        }
    }
    require(log_f.size() >= 3, ErrorCode::SeriesDegenerate,
            "fluctuation function vanished; series has no variance");

    // Least-squares slope of log F vs log n.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < log_n.size(); ++i) {
        sx += log_n[i];
        sy += log_f[i];
        sxx += log_n[i] * log_n[i];
        sxy += log_n[i] * log_f[i];
    }
    double cnt = static_cast<double>(log_n.size());
    double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    double icept = (sy - slope * sx) / cnt;
    double rms = 0.0;
    for (std::size_t i = 0; i < log_n.size(); ++i) {
        double d = log_f[i] - (slope * log_n[i] + icept);
        rms += d * d;
    }
    MixingResult res;
    res.estimate = std::clamp(slope, 0.0, 0.75);
    res.residual = std::sqrt(rms / cnt);
    res.ensemble = EnsembleKind::Poisson;
    res.detail = "dfa1; boxes log-spaced [4, N/4], both-end segmentation";
    return res;
}

namespace {

Spectrum synth_poisson(std::size_t count, std::uint64_t seed) {
    Xoshiro256ss rng(seed);
    Spectrum sp;
    sp.energies.resize(count);
    double acc = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        acc += -std::log1p(-rng.uniform());
        sp.energies[i] = acc;
    }
    return sp;
}

// Semicircle CDF on [-R, R], scaled to total weight 1.
double semicircle_cdf(double x, double radius) {
    double t = std::clamp(x / radius, -1.0, 1.0);
    return 0.5 + (t * std::sqrt(1.0 - t * t) + std::asin(t)) / M_PI;
}

Spectrum synth_matrix(EnsembleKind kind, std::size_t count, std::uint64_t seed) {
    const auto n = static_cast<lapack_int>(2 * count);
    Xoshiro256ss rng(seed);
    std::vector<double> w(n);
    lapack_int found = 0;
    std::vector<lapack_int> isuppz(2 * n);
    lapack_int info = 0;
    if (kind == EnsembleKind::GOE) {
        // A = (G + G^T)/2 with iid standard normal G: off-diagonal variance
        // 1/2, semicircle radius sqrt(2 n).
        std::vector<double> a(static_cast<std::size_t>(n) * n);
        for (lapack_int i = 0; i < n; ++i)
            for (lapack_int j = 0; j < n; ++j) {
                double g = rng.normal();
                if (j < i) {
                    a[static_cast<std::size_t>(j) * n + i] += 0.5 * g;
                } else {
                    a[static_cast<std::size_t>(i) * n + j] =
                        (i == j) ? g : 0.5 * g;
                }
            }
        // Mirror the upper triangle built above.
        info = LAPACKE_dsyevr(LAPACK_ROW_MAJOR, 'N', 'A', 'U', n, a.data(), n, 0, 0, 0, 0, 0.0,
                              &found, w.data(), nullptr, n, isuppz.data());
    } else {
        // Hermitian: diagonal N(0,1), off-diagonal (x + i y)/sqrt(2) with unit
        // modulus variance, semicircle radius 2 sqrt(n).
        std::vector<lapack_complex_double> a(static_cast<std::size_t>(n) * n);
        for (lapack_int i = 0; i < n; ++i) {
            for (lapack_int j = i; j < n; ++j) {
                if (i == j) {
                    a[static_cast<std::size_t>(i) * n + j] = rng.normal();
                } else {
                    double re = rng.normal() / std::sqrt(2.0);
                    double im = rng.normal() / std::sqrt(2.0);
                    a[static_cast<std::size_t>(i) * n + j] = {re, im};
                }
            }
        }
        info = LAPACKE_zheevr(LAPACK_ROW_MAJOR, 'N', 'A', 'U', n, a.data(), n, 0, 0, 0, 0, 0.0,
                              &found, w.data(), nullptr, n, isuppz.data());
    }
    require(info == 0, ErrorCode::NonConvergence, "eigenvalue solve failed in synthesis");
    require(found == n, ErrorCode::NonConvergence, "eigenvalue count mismatch in synthesis");

    double radius = (kind == EnsembleKind::GOE) ? std::sqrt(2.0 * n) : 2.0 * std::sqrt(n);
    Spectrum sp;
    sp.energies.resize(count);
    std::size_t start = count / 2;  // central half of 2*count levels
    double base = semicircle_cdf(w[start], radius);
    for (std::size_t i = 0; i < count; ++i)
        sp.energies[i] = n * (semicircle_cdf(w[start + i], radius) - base);
    return sp;
}

}  // namespace

Spectrum synth_spectrum(EnsembleKind kind, std::size_t count, std::uint64_t seed) {
    require(count >= 4, ErrorCode::ConfigError, "need at least four levels");
    Spectrum sp = kind == EnsembleKind::Poisson ? synth_poisson(count, seed)
                                                : synth_matrix(kind, count, seed);
    sp.source = std::string("synthetic:") + ensemble_name(kind) + ":" + std::to_string(seed);
    std::sort(sp.energies.begin(), sp.energies.end());
    return sp;
}

}  // namespace scarlab
