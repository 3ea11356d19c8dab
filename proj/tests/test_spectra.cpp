#include <catch2/catch.hpp>

#include <cmath>
#include <vector>

#include "scarlab/spectra.hpp"
#include "scarlab/stats.hpp"

using namespace scarlab;

namespace {

// Levels whose smooth counting function is exactly N(E) = E^2 / 2, i.e. the
// m-th level (1-based) sits where the smooth count reads m - 1/2.
Spectrum quadratic_staircase(std::size_t count) {
    Spectrum sp;
    sp.source = "test";
    for (std::size_t m = 1; m <= count; ++m)
        sp.energies.push_back(std::sqrt(2.0 * (m - 0.5)));
    return sp;
}

}  // namespace

TEST_CASE("staircase counts levels at or below the query") {
    Spectrum sp;
    sp.energies = {1.0, 2.0, 2.0, 3.0};
    CHECK(staircase(sp, 0.5) == 0);
    CHECK(staircase(sp, 1.0) == 1);
    CHECK(staircase(sp, 2.0) == 3);
    CHECK(staircase(sp, 10.0) == 4);
}

TEST_CASE("spectrum validation") {
    Spectrum sp;
    sp.energies = {1.0, 0.5};
    CHECK_THROWS_AS(sp.validate(), Error);
    sp.energies = {1.0, std::nan("")};
    CHECK_THROWS_AS(sp.validate(), Error);
    sp.energies = {1.0, 1.0, 2.0};  // degeneracies are fine
    CHECK_NOTHROW(sp.validate());
}

TEST_CASE("power-law unfolding is exact for a quadratic staircase") {
    // For a harmonic well the abscissa t = E^2 linearizes the staircase, so the
    // cubic fit reproduces it exactly and all unfolded spacings are 1.
    Spectrum sp = quadratic_staircase(1200);
    UnfoldedSpectrum uf = unfold(sp, UnfoldMethod::thomas_fermi(2.0));
    CHECK(uf.method.find("tf") != std::string::npos);
    CHECK(uf.mean_spacing == Approx(1.0).epsilon(1e-6));
    auto sp_vals = spacings(uf);
    REQUIRE(sp_vals.size() == uf.window_size() - 1);
    for (double s : sp_vals) CHECK(s == Approx(1.0).epsilon(1e-6));
    // The window trims 2% from each edge.
    CHECK(uf.window_lo == 24);
    CHECK(uf.window_hi == 1200 - 24);
}

TEST_CASE("polynomial fallback handles the same staircase") {
    Spectrum sp = quadratic_staircase(1000);
    UnfoldedSpectrum uf = unfold(sp, UnfoldMethod::polynomial());
    CHECK(uf.mean_spacing == Approx(1.0).epsilon(1e-5));
    for (double s : spacings(uf)) CHECK(s == Approx(1.0).margin(1e-4));
}

TEST_CASE("unfolded levels are non-decreasing for rough spectra") {
    Spectrum sp = synth_spectrum(EnsembleKind::Poisson, 2000, 5);
    UnfoldedSpectrum uf = unfold(sp, UnfoldMethod::polynomial());
    for (std::size_t i = 1; i < uf.levels.size(); ++i) CHECK(uf.levels[i] >= uf.levels[i - 1]);
    CHECK(uf.mean_spacing > 0.98);
    CHECK(uf.mean_spacing < 1.02);
}

TEST_CASE("short spectra are rejected") {
    Spectrum sp = quadratic_staircase(60);
    try {
        unfold(sp, UnfoldMethod::polynomial());
        FAIL("expected rejection");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SpectrumTooShort);
    }
}

TEST_CASE("degenerate spectra fail the fit, not the arithmetic") {
    Spectrum sp;
    sp.energies.assign(500, 7.0);
    try {
        unfold(sp, UnfoldMethod::polynomial());
        FAIL("expected a fit failure");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::FitFailure);
    }
}
