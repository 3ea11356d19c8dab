#include <catch2/catch.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "scarlab/stats.hpp"
#include "test_util.hpp"

using namespace scarlab;

TEST_CASE("surmises are normalized densities with unit mean") {
    for (auto kind : {EnsembleKind::Poisson, EnsembleKind::GOE, EnsembleKind::GUE}) {
        auto pdf = [&](double s) { return wigner_surmise(kind, s); };
        CHECK(testutil::integrate(pdf, 0.0, 40.0, 8000) == Approx(1.0).epsilon(1e-8));
        auto spdf = [&](double s) { return s * wigner_surmise(kind, s); };
        CHECK(testutil::integrate(spdf, 0.0, 40.0, 8000) == Approx(1.0).epsilon(1e-8));
    }
    // Level repulsion: GUE vanishes quadratically, GOE linearly, Poisson not at all.
    CHECK(wigner_surmise(EnsembleKind::Poisson, 0.0) == Approx(1.0));
    CHECK(wigner_surmise(EnsembleKind::GOE, 0.0) == 0.0);
    CHECK(wigner_surmise(EnsembleKind::GUE, 1e-4) < wigner_surmise(EnsembleKind::GOE, 1e-4));
}

TEST_CASE("mixed spacing density interpolates its endpoints") {
    for (double s : {0.0, 0.3, 1.0, 2.5}) {
        CHECK(berry_robnik_pdf(1.0, s) == Approx(std::exp(-s)).epsilon(1e-12));
        CHECK(berry_robnik_pdf(0.0, s) ==
              Approx(wigner_surmise(EnsembleKind::GOE, s)).margin(1e-12));
    }
    // Any mixing fraction still gives a unit-mean probability density.
    for (double q : {0.25, 0.5, 0.8}) {
        auto pdf = [&](double s) { return berry_robnik_pdf(q, s); };
        CHECK(testutil::integrate(pdf, 0.0, 25.0, 6000) == Approx(1.0).epsilon(1e-7));
        auto spdf = [&](double s) { return s * berry_robnik_pdf(q, s); };
        CHECK(testutil::integrate(spdf, 0.0, 25.0, 6000) == Approx(1.0).epsilon(1e-7));
    }
    CHECK_THROWS_AS(berry_robnik_pdf(1.5, 1.0), Error);
}

TEST_CASE("spacing histogram integrates to one") {
    std::vector<double> sp = {0.1, 0.4, 0.4, 0.9, 1.1, 2.0};
    SpacingHistogram hist = nnls_histogram(sp, 4);
    REQUIRE(hist.edges.size() == 5);
    CHECK(hist.edges.front() == 0.0);
    CHECK(hist.edges.back() == Approx(2.0));
    double area = 0.0;
    for (std::size_t k = 0; k < hist.density.size(); ++k)
        area += hist.density[k] * (hist.edges[k + 1] - hist.edges[k]);
    CHECK(area == Approx(1.0).epsilon(1e-12));
    // 0.5-wide bins: {3, 1, 1, 1} of 6 samples (max lands in the last bin).
    CHECK(hist.density[0] == Approx(3.0 / 6.0 / 0.5));
    CHECK(hist.density[3] == Approx(1.0 / 6.0 / 0.5));
}

TEST_CASE("rigidity reference curves") {
    CHECK(delta3_reference(EnsembleKind::Poisson, 30.0) == Approx(2.0));
    CHECK(delta3_reference(EnsembleKind::GOE, 30.0) == Approx(0.33762).margin(5e-5));
    CHECK(delta3_reference(EnsembleKind::GUE, 30.0) == Approx(0.23031).margin(5e-5));
}

namespace {

UnfoldedSpectrum wrap_unit_levels(std::vector<double> levels) {
    UnfoldedSpectrum uf;
    uf.levels = std::move(levels);
    uf.window_lo = 0;
    uf.window_hi = uf.levels.size();
    uf.method = "test";
    uf.mean_spacing = 1.0;
    return uf;
}

// Brute-force rigidity with the same window layout as the library: dense
// sampling of the staircase, numerical least squares per window.
double brute_delta3(const std::vector<double>& lev, double L) {
    double start = lev.front();
    double stop = lev.back();
    double acc = 0.0;
    int count = 0;
    for (double w0 = start; w0 + L <= stop + 1e-12; w0 += 0.25 * L) {
        const int samples = 20000;
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        std::vector<double> us(samples), ms(samples);
        for (int k = 0; k < samples; ++k) {
            double u = w0 + (k + 0.5) * L / samples;
            double m = std::upper_bound(lev.begin(), lev.end(), u) - lev.begin();
            us[k] = u;
            ms[k] = m;
            sx += u; sy += m; sxx += u * u; sxy += u * m;
        }
        double n = samples;
        double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        double icept = (sy - slope * sx) / n;
        double resid = 0.0;
        for (int k = 0; k < samples; ++k) {
            double d = ms[k] - (slope * us[k] + icept);
            resid += d * d;
        }
        acc += resid / samples;  // (1/L) * integral of squared residual
        ++count;
    }
    return acc / count;
}

}  // namespace

TEST_CASE("closed-form rigidity matches dense numerical integration") {
    Spectrum sp = synth_spectrum(EnsembleKind::Poisson, 400, 17);
    auto uf = wrap_unit_levels(sp.energies);
    for (double L : {3.0, 7.0}) {
        Delta3Curve curve = delta3(uf, {L});
        REQUIRE(curve.window_counts[0] > 10);
        CHECK(curve.delta3[0] == Approx(brute_delta3(sp.energies, L)).epsilon(2e-3));
    }
}

TEST_CASE("picket fence rigidity saturates near 1/12") {
    std::vector<double> levels;
    for (int m = 0; m < 1200; ++m) levels.push_back(m + 0.5);
    Delta3Curve curve = delta3(wrap_unit_levels(std::move(levels)), {10.0, 20.0});
    CHECK(curve.delta3[0] == Approx(1.0 / 12.0).margin(0.01));
    CHECK(curve.delta3[1] == Approx(1.0 / 12.0).margin(0.01));
}

TEST_CASE("uncorrelated levels follow the linear rigidity law") {
    // Average a few independent sequences; single realizations fluctuate.
    std::vector<double> ls = {5.0, 10.0, 15.0};
    std::vector<double> mean(ls.size(), 0.0);
    const int reps = 4;
    for (int seed = 0; seed < reps; ++seed) {
        Spectrum sp = synth_spectrum(EnsembleKind::Poisson, 4000, 100 + seed);
        Delta3Curve c = delta3(wrap_unit_levels(sp.energies), ls);
        for (std::size_t i = 0; i < ls.size(); ++i) mean[i] += c.delta3[i] / reps;
    }
    for (std::size_t i = 0; i < ls.size(); ++i)
        CHECK(mean[i] == Approx(ls[i] / 15.0).epsilon(0.12));
}

TEST_CASE("random-matrix spectra are spectrally rigid") {
    Spectrum sp = synth_spectrum(EnsembleKind::GOE, 1500, 23);
    Delta3Curve c = delta3(wrap_unit_levels(sp.energies), {20.0});
    CHECK(c.delta3[0] == Approx(delta3_reference(EnsembleKind::GOE, 20.0)).margin(0.04));
}

TEST_CASE("rigidity windows must fit inside the spectrum") {
    std::vector<double> levels;
    for (int m = 0; m < 200; ++m) levels.push_back(m + 0.5);
    auto uf = wrap_unit_levels(std::move(levels));
    CHECK_THROWS_AS(delta3(uf, {0.0}), Error);
    CHECK_THROWS_AS(delta3(uf, {31.0}), Error);  // grid capped at 30
    CHECK_NOTHROW(delta3(uf, {30.0}));
}

TEST_CASE("mixing fraction fit recovers pure limits from rigidity") {
    std::vector<double> ls;
    for (double l = 2.0; l <= 30.0; l += 2.0) ls.push_back(l);
    Delta3Curve poisson_curve, goe_curve;
    poisson_curve.l_values = ls;
    goe_curve.l_values = ls;
    for (double l : ls) {
        poisson_curve.delta3.push_back(delta3_reference(EnsembleKind::Poisson, l));
        poisson_curve.window_counts.push_back(100);
        goe_curve.delta3.push_back(delta3_reference(EnsembleKind::GOE, l));
        goe_curve.window_counts.push_back(100);
    }
    MixingResult qp = fit_Q(poisson_curve, EnsembleKind::GOE);
    CHECK(qp.estimate == Approx(1.0).margin(1e-4));
    CHECK(qp.residual < 1e-6);
    MixingResult qg = fit_Q(goe_curve, EnsembleKind::GOE);
    CHECK(qg.estimate == Approx(0.0).margin(1e-4));
    CHECK(qg.residual < 1e-6);
}

TEST_CASE("mixing fraction fit is self-consistent at interior values") {
    std::vector<double> ls;
    for (double l = 1.0; l <= 30.0; l += 1.0) ls.push_back(l);
    for (double q_true : {0.3, 0.6}) {
        Delta3Curve curve;
        curve.l_values = ls;
        for (double l : ls) {
            double p = q_true * l / 15.0;
            double x = (1.0 - q_true) * l;
            double ch = x < 1.0 ? x * delta3_reference(EnsembleKind::GOE, 1.0)
                                : delta3_reference(EnsembleKind::GOE, x);
            curve.delta3.push_back(p + ch);
            curve.window_counts.push_back(100);
        }
        MixingResult r = fit_Q(curve, EnsembleKind::GOE);
        CHECK(r.estimate == Approx(q_true).margin(1e-3));
    }
}

TEST_CASE("likelihood fit separates regular from chaotic spacings") {
    Spectrum goe = synth_spectrum(EnsembleKind::GOE, 3000, 31);
    std::vector<double> goe_sp;
    for (std::size_t i = 1; i < goe.energies.size(); ++i)
        goe_sp.push_back(goe.energies[i] - goe.energies[i - 1]);
    MixingResult chaotic = fit_q(goe_sp);
    CHECK(chaotic.estimate < 0.1);

    Spectrum poi = synth_spectrum(EnsembleKind::Poisson, 3000, 37);
    std::vector<double> poi_sp;
    for (std::size_t i = 1; i < poi.energies.size(); ++i)
        poi_sp.push_back(poi.energies[i] - poi.energies[i - 1]);
    MixingResult regular = fit_q(poi_sp);
    CHECK(regular.estimate > 0.9);
}

TEST_CASE("likelihood fit finds an even superposition") {
    // Half the density regular, half chaotic: stretch each component to mean
    // spacing 2 and merge, leaving unit total density.
    Spectrum poi = synth_spectrum(EnsembleKind::Poisson, 2000, 41);
    Spectrum goe = synth_spectrum(EnsembleKind::GOE, 2000, 43);
    std::vector<double> merged;
    for (double e : poi.energies) merged.push_back(2.0 * e);
    for (double e : goe.energies) merged.push_back(2.0 * e);
    std::sort(merged.begin(), merged.end());
    std::vector<double> sp;
    for (std::size_t i = 1; i < merged.size(); ++i) sp.push_back(merged[i] - merged[i - 1]);
    MixingResult r = fit_q(sp);
    CHECK(r.estimate == Approx(0.5).margin(0.07));
    CHECK(!r.detail.empty());
}

TEST_CASE("fluctuation exponent distinguishes the ensembles") {
    Spectrum poi = synth_spectrum(EnsembleKind::Poisson, 4000, 53);
    std::vector<double> poi_sp;
    for (std::size_t i = 1; i < poi.energies.size(); ++i)
        poi_sp.push_back(poi.energies[i] - poi.energies[i - 1]);
    MixingResult a_poi = dfa_alpha(poi_sp);
    CHECK(a_poi.estimate == Approx(0.5).margin(0.05));

    // A rigid spectrum has logarithmic fluctuation growth, so the fitted
    // exponent sits far below the uncorrelated value and drifts slowly
    // downward with series length (measured 0.23 at N=500, 0.18 at N=4000).
    Spectrum goe = synth_spectrum(EnsembleKind::GOE, 2000, 59);
    std::vector<double> goe_sp;
    for (std::size_t i = 1; i < goe.energies.size(); ++i)
        goe_sp.push_back(goe.energies[i] - goe.energies[i - 1]);
    MixingResult a_goe = dfa_alpha(goe_sp);
    CHECK(a_goe.estimate == Approx(0.20).margin(0.07));
    CHECK(a_goe.estimate < a_poi.estimate - 0.2);
}

TEST_CASE("fluctuation analysis rejects unusable series") {
    std::vector<double> short_series(100, 1.0);
    try {
        dfa_alpha(short_series);
        FAIL("expected rejection");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SeriesTooShort);
    }
    std::vector<double> flat(1000, 1.0);
    try {
        dfa_alpha(flat);
        FAIL("expected degeneracy");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SeriesDegenerate);
    }
}

TEST_CASE("synthetic sequences reproduce on reseed") {
    for (auto kind : {EnsembleKind::Poisson, EnsembleKind::GOE}) {
        Spectrum a = synth_spectrum(kind, 600, 71);
        Spectrum b = synth_spectrum(kind, 600, 71);
        REQUIRE(a.energies.size() == 600);
        bool equal = true;
        for (std::size_t i = 0; i < a.energies.size(); ++i)
            equal = equal && (a.energies[i] == b.energies[i]);
        CHECK(equal);
        CHECK(std::is_sorted(a.energies.begin(), a.energies.end()));
        CHECK(a.source.find("synthetic") == 0);
    }
}

TEST_CASE("synthetic waiting times are exponential") {
    Spectrum sp = synth_spectrum(EnsembleKind::Poisson, 5000, 73);
    std::vector<double> gaps;
    for (std::size_t i = 1; i < sp.energies.size(); ++i)
        gaps.push_back(sp.energies[i] - sp.energies[i - 1]);
    double ks = testutil::ks_distance(gaps, [](double s) { return 1.0 - std::exp(-s); });
    CHECK(ks < 0.025);
}

namespace {

// Numeric CDF of a surmise, for distribution tests.
std::function<double(double)> surmise_cdf(EnsembleKind kind) {
    return [kind](double s) {
        return testutil::integrate([kind](double t) { return wigner_surmise(kind, t); }, 0.0,
                                   s, 200);
    };
}

}  // namespace

TEST_CASE("matrix spectra show Wigner repulsion") {
    Spectrum goe = synth_spectrum(EnsembleKind::GOE, 1500, 79);
    std::vector<double> sp;
    for (std::size_t i = 1; i < goe.energies.size(); ++i)
        sp.push_back(goe.energies[i] - goe.energies[i - 1]);
    double mean = 0.0;
    for (double s : sp) mean += s;
    mean /= sp.size();
    CHECK(mean == Approx(1.0).margin(0.05));
    CHECK(testutil::ks_distance(sp, surmise_cdf(EnsembleKind::GOE)) < 0.05);

    Spectrum gue = synth_spectrum(EnsembleKind::GUE, 1000, 83);
    std::vector<double> spu;
    for (std::size_t i = 1; i < gue.energies.size(); ++i)
        spu.push_back(gue.energies[i] - gue.energies[i - 1]);
    CHECK(testutil::ks_distance(spu, surmise_cdf(EnsembleKind::GUE)) < 0.05);
    // Stronger small-s suppression than the orthogonal ensemble.
    auto frac_below = [](const std::vector<double>& v, double cut) {
        double c = 0;
        for (double s : v)
            if (s < cut) c += 1;
        return c / v.size();
    };
    CHECK(frac_below(spu, 0.1) < 0.004);
    CHECK(frac_below(sp, 0.1) <= 0.02);
}
