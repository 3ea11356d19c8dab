#include "scarlab/spectra.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace scarlab {

void Spectrum::validate() const {
    require(std::is_sorted(energies.begin(), energies.end()), ErrorCode::DomainError,
            "spectrum must be sorted");
    for (double e : energies)
        require(std::isfinite(e), ErrorCode::DomainError, "spectrum contains non-finite level");
}

std::size_t staircase(const Spectrum& spectrum, double e) {
    return std::upper_bound(spectrum.energies.begin(), spectrum.energies.end(), e) -
           spectrum.energies.begin();
}

namespace {

// Least-squares polynomial fit of target(t) with the abscissa mapped to [0, 1]
// for conditioning.  Returns fitted values at the sample points.
std::vector<double> poly_fit_eval(const std::vector<double>& t, const std::vector<double>& target,
                                  int degree) {
    double t_min = *std::min_element(t.begin(), t.end());
    double t_max = *std::max_element(t.begin(), t.end());
    require(t_max > t_min, ErrorCode::FitFailure, "degenerate abscissa in staircase fit");
    double scale = 1.0 / (t_max - t_min);

    Eigen::MatrixXd vander(t.size(), degree + 1);
    for (std::size_t m = 0; m < t.size(); ++m) {
        double u = (t[m] - t_min) * scale;
        double p = 1.0;
        for (int d = 0; d <= degree; ++d) {
            vander(m, d) = p;
            p *= u;
        }
    }
    Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(target.data(), target.size());
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(vander);
    double cond = std::abs(qr.matrixR()(0, 0)) /
                  std::max(std::abs(qr.matrixR()(degree, degree)), 1e-300);
    require(cond < 1e12, ErrorCode::FitFailure,
            "ill-conditioned staircase fit, condition ~" + std::to_string(cond));
    Eigen::VectorXd coef = qr.solve(rhs);

    std::vector<double> fitted(t.size());
    for (std::size_t m = 0; m < t.size(); ++m) {
        double u = (t[m] - t_min) * scale;
        double acc = 0.0;
        for (int d = degree; d >= 0; --d) acc = acc * u + coef(d);
        fitted[m] = acc;
    }
    return fitted;
}

}  // namespace

UnfoldedSpectrum unfold(const Spectrum& spectrum, const UnfoldMethod& method) {
    spectrum.validate();
    const auto n_levels = spectrum.energies.size();
    require(n_levels >= 100, ErrorCode::SpectrumTooShort,
            "unfolding needs at least 100 levels, got " + std::to_string(n_levels));

    // Staircase samples: at level m the staircase averages to m + 1/2.
    std::vector<double> target(n_levels);
    for (std::size_t m = 0; m < n_levels; ++m) target[m] = m + 0.5;

    std::vector<double> t(n_levels);
    std::string descriptor;
    if (method.kind == UnfoldMethod::Kind::ThomasFermi) {
        require(method.well_exponent > 0.0, ErrorCode::ConfigError,
                "well exponent must be positive");
        double expo = 1.0 + 2.0 / method.well_exponent;
        double e_min = spectrum.energies.front();
        // Shift so the Thomas-Fermi variable starts at zero even if levels
        // start well above it (perturbed wells raise the floor).
        double base = std::min(0.0, e_min);
        for (std::size_t m = 0; m < n_levels; ++m)
            t[m] = std::pow(spectrum.energies[m] - base, expo);
        descriptor = "tf-cubic(n=" + std::to_string(method.well_exponent) + ")";
    } else {
        t = spectrum.energies;
        descriptor = "poly6";
    }

    int degree = (method.kind == UnfoldMethod::Kind::ThomasFermi) ? 3 : 6;
    std::vector<double> fitted = poly_fit_eval(t, target, degree);

    UnfoldedSpectrum out;
    out.levels.resize(n_levels);
    // Running max keeps the sequence non-decreasing where the fit wiggles at
    // the very edges.
    double run = -1e300;
    for (std::size_t m = 0; m < n_levels; ++m) {
        run = std::max(run, fitted[m]);
        out.levels[m] = run;
    }

    auto trim = static_cast<std::size_t>(std::ceil(0.02 * n_levels));
    out.window_lo = trim;
    out.window_hi = n_levels - trim;
    require(out.window_hi > out.window_lo + 1, ErrorCode::SpectrumTooShort,
            "window empty after edge trim");
    out.method = descriptor;

    double span = out.levels[out.window_hi - 1] - out.levels[out.window_lo];
    out.mean_spacing = span / (out.window_size() - 1);
    require(out.mean_spacing > 0.98 && out.mean_spacing < 1.02, ErrorCode::FitFailure,
            "unfolded mean spacing " + std::to_string(out.mean_spacing) +
                " outside [0.98, 1.02]");
    return out;
}

std::vector<double> spacings(const UnfoldedSpectrum& unfolded) {
    require(unfolded.window_size() >= 2, ErrorCode::WindowTooShort,
            "need at least two levels in the window");
    std::vector<double> out(unfolded.window_size() - 1);
    for (std::size_t m = unfolded.window_lo; m + 1 < unfolded.window_hi; ++m)
        out[m - unfolded.window_lo] = unfolded.levels[m + 1] - unfolded.levels[m];
    return out;
}

}  // namespace scarlab
