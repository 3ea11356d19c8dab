#include <catch2/catch.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "scarlab/analytic.hpp"
#include "scarlab/model.hpp"
#include "scarlab/solver.hpp"
#include "scarlab/subspectrum.hpp"

using namespace scarlab;
using cplx = std::complex<double>;

namespace {

void normalize(std::vector<cplx>& v, double cell) {
    double acc = 0.0;
    for (const cplx& z : v) acc += std::norm(z);
    const double s = 1.0 / std::sqrt(acc * cell);
    for (cplx& z : v) z *= s;
}

std::vector<FDLabel> labels_of(const ResonantSet& set) { return set.members; }

}  // namespace

TEST_CASE("resonant ladder generation matches worked examples", "[subspectrum]") {
    SECTION("interior anchor keeps the full ladder") {
        ResonantSet set = resonant_set(FDLabel{10, 20}, ResonanceLabel(5, 2), 2);
        std::vector<FDLabel> want{{6, 30}, {8, 25}, {10, 20}, {12, 15}, {14, 10}};
        CHECK(labels_of(set) == want);
        CHECK(set.contains(FDLabel{12, 15}));
        CHECK_FALSE(set.contains(FDLabel{12, 16}));
    }
    SECTION("low anchor drops members with negative radial index") {
        ResonantSet set = resonant_set(FDLabel{1, 5}, ResonanceLabel(5, 2), 3);
        std::vector<FDLabel> want{{1, 5}, {3, 0}, {5, -5}, {7, -10}};
        CHECK(labels_of(set) == want);
    }
    SECTION("zero half-length yields the anchor alone") {
        ResonantSet set = resonant_set(FDLabel{4, -3}, ResonanceLabel(3, 1), 0);
        CHECK(labels_of(set) == std::vector<FDLabel>{{4, -3}});
    }
    SECTION("re-anchoring shifts the window but not the ladder") {
        ResonantSet a = resonant_set(FDLabel{10, 20}, ResonanceLabel(5, 2), 2);
        ResonantSet b = resonant_set(FDLabel{12, 15}, ResonanceLabel(5, 2), 2);
        CHECK(b.contains(a.anchor));
        int shared = 0;
        for (const FDLabel& m : a.members)
            if (b.contains(m)) ++shared;
        CHECK(shared == 4);
    }
    SECTION("invalid inputs are rejected") {
        CHECK_THROWS_AS(resonant_set(FDLabel{-1, 0}, ResonanceLabel(5, 2), 1), Error);
        CHECK_THROWS_AS(resonant_set(FDLabel{0, 0}, ResonanceLabel(5, 2), -1), Error);
        CHECK_THROWS_AS(resonant_set(FDLabel{0, 0}, ResonanceLabel{}, 1), Error);
    }
}

TEST_CASE("expansion coefficients recover a synthetic superposition", "[subspectrum]") {
    Grid2D g = Grid2D::centered(64, 64, 6.0);
    const double cell = g.cell_area();

    std::vector<BasisState> basis(2);
    basis[0] = {FDLabel{0, 0}, fock_darwin_energy({0, 0}, 1.0, 0.0),
                fock_darwin_state({0, 0}, 1.0, 0.0, g)};
    basis[1] = {FDLabel{0, 1}, fock_darwin_energy({0, 1}, 1.0, 0.0),
                fock_darwin_state({0, 1}, 1.0, 0.0, g)};
    for (auto& b : basis) normalize(b.values, cell);

    const double inv_rt2 = 1.0 / std::sqrt(2.0);
    std::vector<cplx> psi(g.size());
    for (std::size_t i = 0; i < psi.size(); ++i)
        psi[i] = inv_rt2 * (basis[0].values[i] + cplx(0.0, 1.0) * basis[1].values[i]);

    Subspectrum sub = overlaps(psi, g, basis, 1e-8);
    REQUIRE(sub.weights.size() == 2);
    CHECK(sub.completeness == Approx(1.0).margin(1e-10));
    CHECK(sub.weights[0].label == FDLabel{0, 0});
    CHECK(sub.weights[1].label == FDLabel{0, 1});
    CHECK(sub.weights[0].energy < sub.weights[1].energy);
    CHECK(sub.weights[0].weight == Approx(0.5).margin(1e-10));
    CHECK(sub.weights[1].weight == Approx(0.5).margin(1e-10));
    CHECK(sub.weights[0].coeff.real() == Approx(inv_rt2).margin(1e-8));
    CHECK(std::abs(sub.weights[0].coeff.imag()) < 1e-8);
    CHECK(sub.weights[1].coeff.imag() == Approx(inv_rt2).margin(1e-8));

    SECTION("orthogonal remainder shows up as lost completeness") {
        std::vector<cplx> lone = fock_darwin_state({0, -1}, 1.0, 0.0, g);
        normalize(lone, cell);
        Subspectrum gone = overlaps(lone, g, basis, 1e-8);
        CHECK(gone.completeness < 1e-10);
    }
}

TEST_CASE("expansion rejects bad bases and mismatched grids", "[subspectrum]") {
    Grid2D g = Grid2D::centered(64, 64, 6.0);
    std::vector<BasisState> basis(1);
    basis[0] = {FDLabel{0, 0}, 1.0, fock_darwin_state({0, 0}, 1.0, 0.0, g)};
    normalize(basis[0].values, g.cell_area());
    std::vector<cplx> psi = basis[0].values;

    SECTION("duplicate basis member breaks orthonormality") {
        std::vector<BasisState> dup{basis[0], basis[0]};
        dup[1].label = FDLabel{0, 1};
        CHECK_THROWS_AS(overlaps(psi, g, dup, 1e-8), Error);
        try {
            overlaps(psi, g, dup, 1e-8);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::BasisNotOrthonormal);
        }
    }
    SECTION("state length must match the grid") {
        std::vector<cplx> bad(psi.begin(), psi.end() - 1);
        CHECK_THROWS_AS(overlaps(bad, g, basis, 1e-8), Error);
    }
    SECTION("basis member length must match the grid") {
        std::vector<BasisState> bad = basis;
        bad[0].values.pop_back();
        CHECK_THROWS_AS(overlaps(psi, g, bad, 1e-8), Error);
    }
    SECTION("empty basis is rejected") {
        CHECK_THROWS_AS(overlaps(psi, g, {}, 1e-8), Error);
    }
}

TEST_CASE("scar metrics weigh ladder members", "[subspectrum]") {
    Subspectrum sub;
    sub.completeness = 1.0;
    auto add = [&sub](FDLabel label, double w) {
        WeightEntry e;
        e.m = sub.weights.size();
        e.label = label;
        e.energy = static_cast<double>(sub.weights.size());
        e.weight = w;
        sub.weights.push_back(e);
    };
    add({1, 5}, 0.3);
    add({3, 0}, 0.3);
    add({5, -5}, 0.2);
    add({7, -10}, 0.19);
    add({0, 2}, 0.01);

    ResonantSet ladder = resonant_set(FDLabel{1, 5}, ResonanceLabel(5, 2), 3);
    ScarStrength s = scar_strength(sub, ladder);
    CHECK(s.set_weight == Approx(0.99).margin(1e-12));
    double sumsq = 0.09 + 0.09 + 0.04 + 0.19 * 0.19 + 0.01 * 0.01;
    CHECK(s.participation == Approx(1.0 / sumsq).margin(1e-9));

    SECTION("uniform ladder has participation equal to its length") {
        Subspectrum uni;
        uni.completeness = 1.0;
        for (int k = 0; k < 5; ++k) {
            WeightEntry e;
            e.m = static_cast<std::size_t>(k);
            e.label = FDLabel{1 + 2 * k, 20 - 5 * k};
            e.energy = k;
            e.weight = 0.2;
            uni.weights.push_back(e);
        }
        ResonantSet set = resonant_set(FDLabel{1, 20}, ResonanceLabel(5, 2), 4);
        ScarStrength u = scar_strength(uni, set);
        CHECK(u.set_weight == Approx(1.0).margin(1e-12));
        CHECK(u.participation == Approx(5.0).margin(1e-9));
    }
    SECTION("incomplete expansions are refused") {
        Subspectrum half = sub;
        half.completeness = 0.5;
        CHECK_THROWS_AS(scar_strength(half, ladder), Error);
        try {
            scar_strength(half, ladder);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::IncompleteExpansion);
        }
    }
}

TEST_CASE("best ladder search maximizes weight and breaks ties simply", "[subspectrum]") {
    Subspectrum sub;
    sub.completeness = 1.0;
    auto add = [&sub](FDLabel label, double e, double w) {
        WeightEntry entry;
        entry.m = sub.weights.size();
        entry.label = label;
        entry.energy = e;
        entry.weight = w;
        sub.weights.push_back(entry);
    };
    add({1, 5}, 1.0, 0.3);
    add({3, 0}, 2.0, 0.3);
    add({5, -5}, 3.0, 0.2);
    add({7, -10}, 4.0, 0.19);
    add({0, 2}, 5.0, 0.01);

    SECTION("the dominant ladder wins") {
        auto [set, w] = best_resonant_set(sub, {ResonanceLabel(5, 2), ResonanceLabel(3, 1)}, 4);
        CHECK(set.resonance == ResonanceLabel(5, 2));
        CHECK(w == Approx(0.99).margin(1e-12));
        CHECK(set.contains(FDLabel{1, 5}));
        CHECK(set.contains(FDLabel{7, -10}));
    }
    SECTION("ties prefer the simpler resonance") {
        Subspectrum lone;
        lone.completeness = 1.0;
        WeightEntry e;
        e.m = 0;
        e.label = FDLabel{4, 0};
        e.energy = 1.0;
        e.weight = 1.0;
        lone.weights.push_back(e);
        auto [set, w] = best_resonant_set(lone, {ResonanceLabel(5, 2), ResonanceLabel(3, 1)}, 2);
        CHECK(w == Approx(1.0).margin(1e-12));
        CHECK(set.resonance == ResonanceLabel(3, 1));
        CHECK(set.anchor == FDLabel{4, 0});
    }
    SECTION("incomplete expansions are refused") {
        Subspectrum half = sub;
        half.completeness = 0.9;
        CHECK_THROWS_AS(best_resonant_set(half, {ResonanceLabel(5, 2)}, 2), Error);
    }
}

TEST_CASE("harmonic reference basis reproduces analytic levels", "[subspectrum]") {
    PotentialSpec spec;
    spec.n = 2.0;
    spec.omega0 = 1.0;
    Grid2D g = Grid2D::centered(64, 64, 6.0);
    SolverConfig cfg;

    std::vector<BasisState> basis =
        build_unperturbed_basis(spec, g, 0.0, 4.0, 2.5, {ResonanceLabel(5, 2)}, 1, cfg);

    // the E = 4 shell plus the k = 1 ladder member (3, -4) anchored at (1, 1)
    REQUIRE(basis.size() >= 5);
    CHECK(std::is_sorted(basis.begin(), basis.end(), [](const auto& a, const auto& b) {
        return a.energy < b.energy;
    }));
    auto has = [&basis](FDLabel want) {
        return std::any_of(basis.begin(), basis.end(),
                           [&want](const BasisState& s) { return s.label == want; });
    };
    CHECK(has({0, 3}));
    CHECK(has({0, -3}));
    CHECK(has({1, 1}));
    CHECK(has({1, -1}));
    CHECK(has({3, -4}));
    for (const BasisState& s : basis)
        CHECK(s.energy == Approx(fock_darwin_energy(s.label, 1.0, 0.0)).margin(1e-12));

    SECTION("identity expansion concentrates on the right label") {
        std::vector<cplx> psi = fock_darwin_state({1, 1}, 1.0, 0.0, g);
        normalize(psi, g.cell_area());
        Subspectrum sub = overlaps(psi, g, basis, 1e-6);
        CHECK(sub.completeness == Approx(1.0).margin(1e-6));
        for (const WeightEntry& e : sub.weights) {
            if (e.label == FDLabel{1, 1})
                CHECK(e.weight == Approx(1.0).margin(1e-6));
            else
                CHECK(e.weight < 1e-6);
        }
    }
    SECTION("a field splits the shell but keeps the labels") {
        std::vector<BasisState> mag =
            build_unperturbed_basis(spec, g, 0.8, 4.0, 2.5, {}, 0, cfg);
        REQUIRE(!mag.empty());
        for (const BasisState& s : mag)
            CHECK(s.energy == Approx(fock_darwin_energy(s.label, 1.0, 0.8)).margin(1e-12));
    }
}

TEST_CASE("expansion completeness grows with the window", "[subspectrum]") {
    PotentialSpec spec;
    spec.n = 2.0;
    Grid2D g = Grid2D::centered(64, 64, 6.0);
    SolverConfig cfg;
    const double cell = g.cell_area();

    std::vector<cplx> a = fock_darwin_state({0, 3}, 1.0, 0.0, g);   // E = 4
    std::vector<cplx> b = fock_darwin_state({0, 4}, 1.0, 0.0, g);   // E = 5
    std::vector<cplx> psi(g.size());
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] = a[i] + b[i];
    normalize(psi, cell);

    double prev = -1.0;
    for (double ws : {0.5, 2.5, 6.0}) {
        std::vector<BasisState> basis = build_unperturbed_basis(spec, g, 0.0, 4.0, ws, {}, 0, cfg);
        Subspectrum sub = overlaps(psi, g, basis, 1e-6);
        CHECK(sub.completeness >= prev - 1e-12);
        CHECK(sub.completeness <= 1.0 + 1e-5);
        prev = sub.completeness;
    }
    CHECK(prev == Approx(1.0).margin(1e-6));
}

TEST_CASE("anharmonic reference basis labels angular momentum", "[subspectrum]") {
    PotentialSpec spec;
    spec.n = 5.0;
    spec.omega0 = 1.0;
    spec.M = 0.0;
    Grid2D g = Grid2D::centered(64, 64, 3.2);
    const double ec = semiclassical_energy(spec, 25.0);

    // the default step schedule bottoms out with a splitting residual near
    // 2e-4 here; states from the same effective propagator are consistent far
    // below that, so a tolerance just above the floor is enough for labeling
    SolverConfig cfg;
    cfg.tol = 3e-4;
    cfg.seed = 31;
    std::vector<BasisState> basis =
        build_unperturbed_basis(spec, g, 0.0, ec, 6.0, {ResonanceLabel(5, 2)}, 2, cfg);

    REQUIRE(basis.size() >= 8);
    CHECK(std::is_sorted(basis.begin(), basis.end(), [](const auto& a, const auto& b) {
        return a.energy < b.energy;
    }));
    // circular well: +l/-l partners are degenerate whenever both are selected
    // (ladder extensions may pull in one side of a pair on its own)
    int pairs = 0;
    for (const BasisState& s : basis) {
        if (s.label.l <= 0) continue;
        auto partner = std::find_if(basis.begin(), basis.end(), [&s](const BasisState& t) {
            return t.label.n_r == s.label.n_r && t.label.l == -s.label.l;
        });
        if (partner == basis.end()) continue;
        ++pairs;
        CHECK(partner->energy == Approx(s.energy).margin(1e-6));
    }
    CHECK(pairs >= 3);

    SECTION("independently solved states expand to unit weight") {
        SolverConfig icfg;
        icfg.k = 30;
        icfg.tol = 3e-4;
        icfg.seed = 77;
        EigenSet es = solve_itp(build_potential_grid(spec, g), 0.0, icfg);

        std::size_t pick = 0;
        for (std::size_t i = 0; i < es.energies.size(); ++i)
            if (std::abs(es.energies[i] - ec) < std::abs(es.energies[pick] - ec)) pick = i;

        Subspectrum sub = overlaps(es.states[pick], g, basis, 1e-6);
        CHECK(sub.completeness >= 0.999);
        // weight may split over a degenerate pair; sum the top entry's cluster
        double top_e = 0.0, top_w = -1.0;
        for (const WeightEntry& e : sub.weights)
            if (e.weight > top_w) {
                top_w = e.weight;
                top_e = e.energy;
            }
        double cluster = 0.0;
        for (const WeightEntry& e : sub.weights)
            if (std::abs(e.energy - top_e) < 1e-6) cluster += e.weight;
        CHECK(cluster >= 0.999);
    }
}
