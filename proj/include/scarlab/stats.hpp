#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scarlab/spectra.hpp"

namespace scarlab {

enum class EnsembleKind { Poisson, GOE, GUE };

const char* ensemble_name(EnsembleKind kind);

/// Unit-area spacing histogram over [0, s_max].
struct SpacingHistogram {
    std::vector<double> edges;    // bins + 1 entries
    std::vector<double> density;  // bins entries, integrates to 1
};

SpacingHistogram nnls_histogram(const std::vector<double>& spacings, int bins);

/// Wigner surmise P(s) for GOE or GUE; Poisson gives e^{-s}.
double wigner_surmise(EnsembleKind kind, double s);

/// Berry-Robnik spacing density with regular fraction q in [0, 1]:
/// P(s; q) = e^{-q s} [ q^2 erfc(sqrt(pi)(1-q)s/2)
///                      + (2 q (1-q) + pi (1-q)^3 s / 2) e^{-pi (1-q)^2 s^2 / 4} ].
/// Reduces to e^{-s} at q = 1 and to the GOE surmise at q = 0.
double berry_robnik_pdf(double q, double s);

struct MixingResult {
    double estimate = 0.0;    ///< q, Q, or alpha
    double residual = 0.0;    ///< fit diagnostic (negative mean log-likelihood or RMS)
    EnsembleKind ensemble = EnsembleKind::GOE;
    std::string detail;       ///< implementation notes recorded with the fit
};

/// Maximum-likelihood Berry-Robnik fraction from raw spacings.
MixingResult fit_q(const std::vector<double>& spacings);

/// Spectral rigidity: least-squares deviation of the unfolded staircase from
/// the best line, averaged over overlapping windows of length L (stride L/4),
/// with the per-window integral evaluated in closed form.
struct Delta3Curve {
    std::vector<double> l_values;
    std::vector<double> delta3;
    std::vector<std::size_t> window_counts;
};

Delta3Curve delta3(const UnfoldedSpectrum& unfolded, const std::vector<double>& l_values);

/// Reference rigidity curves: Poisson L/15; GOE ln(L)/pi^2 - 0.007;
/// GUE ln(L)/(2 pi^2) + 0.058 (asymptotic forms).
double delta3_reference(EnsembleKind kind, double l);

/// Least-squares chaos fraction Q from a rigidity curve via
/// Delta3(L) = Delta3_Poisson(Q L) + Delta3_chaotic((1 - Q) L).
/// Below L = 1 the divergent chaotic log form is replaced by a linear ramp
/// through the origin matched continuously at L = 1.
MixingResult fit_Q(const Delta3Curve& curve, EnsembleKind chaotic);

/// Detrended fluctuation exponent of the spacing series (order-1 detrending,
/// boxes log-spaced in [4, N/4]); clamped to [0, 0.75].
MixingResult dfa_alpha(const std::vector<double>& spacings);

/// Synthetic reference spectra: Poisson from unit exponential waiting times;
/// GOE/GUE from dense Gaussian matrices, central half retained and unfolded
/// by the semicircle law.
Spectrum synth_spectrum(EnsembleKind kind, std::size_t count, std::uint64_t seed);

}  // namespace scarlab
