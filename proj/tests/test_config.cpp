#include <catch2/catch.hpp>

#include <string>

#include "scarlab/config.hpp"

using namespace scarlab;

namespace {

std::string error_text(const std::string& cfg) {
    try {
        RunConfig::from_text(cfg);
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("a full configuration parses into typed blocks", "[config]") {
    const std::string text = R"(# disordered well, case II analog
[potential]
n = 5          # well exponent
omega0 = 1.0

[bumps]
M = 26.0
sigma = 0.10
density = 2
seed = 7

[field]
B = 0.5

[solver]
grid = 64
extent = 3.2
num_states = 40
tol = 1e-5
dtau_min = 4e-4
seed = 99

[stats]
ensemble = "gue"
L_max = 25
bins = 32

[sweep]
M = [12, 26, 40]
sigma = [0.02, 0.1, 0.18]
seeds = [1, 2, 3, 4]

[subspec]
state = 17
window = 12.5
k_max = 3
resonances = ["5:2", "3:1"]

[dos]
b_stop = 1.5
window = 0.002
)";
    RunConfig rc = RunConfig::from_text(text);
    CHECK(rc.potential.n == 5.0);
    CHECK(rc.potential.M == 26.0);
    CHECK(rc.potential.sigma == 0.10);
    CHECK(rc.potential.seed == 7);
    CHECK_FALSE(rc.field.sweep);
    CHECK(rc.field.b == 0.5);
    CHECK(rc.solver.grid == 64);
    CHECK(rc.solver.extent == 3.2);
    CHECK(rc.solver.num_states == 40);
    CHECK(rc.solver.tol == 1e-5);
    CHECK(rc.solver.seed == 99);
    SolverConfig sc = rc.solver.solver();
    CHECK(sc.k == 40);
    CHECK(sc.dtau_schedule.front() == 0.1);
    CHECK(sc.dtau_schedule.back() > 4e-4);
    CHECK(sc.dtau_schedule.back() <= 8e-4);
    CHECK(rc.stats.resolve(rc.field.b) == EnsembleKind::GUE);
    CHECK(rc.stats.l_max == 25.0);
    CHECK(rc.sweep.m_values == std::vector<double>{12, 26, 40});
    CHECK(rc.sweep.seeds == std::vector<std::uint64_t>{1, 2, 3, 4});
    CHECK(rc.subspec.state == 17);
    CHECK(rc.subspec.resonances.size() == 2);
    CHECK(rc.subspec.resonances[0] == ResonanceLabel(5, 2));
    CHECK(rc.subspec.resonances[1] == ResonanceLabel(3, 1));
    CHECK(rc.dos.axes.b_stop == 1.5);
    CHECK(rc.dos.axes.window == 0.002);
    CHECK(rc.text == text);
}

TEST_CASE("an empty configuration yields desk-scale defaults", "[config]") {
    RunConfig rc = RunConfig::from_text("");
    CHECK(rc.potential.n == 5.0);
    CHECK(rc.potential.M == 0.0);
    CHECK(rc.solver.grid == 128);
    CHECK(rc.solver.num_states == 600);
    CHECK(rc.solver.tol == 1e-6);
    CHECK(rc.solver.extent == 4.5);
    CHECK(rc.field.b == 0.0);
    CHECK(rc.field.values() == std::vector<double>{0.0});
    CHECK(rc.stats.resolve(0.0) == EnsembleKind::GOE);
    CHECK(rc.stats.resolve(0.3) == EnsembleKind::GUE);
    CHECK(rc.sweep.m_values == std::vector<double>{0.0});
    CHECK(rc.sweep.sigma_values == std::vector<double>{0.1});
    CHECK(rc.sweep.seeds == std::vector<std::uint64_t>{1});
    CHECK(rc.subspec.resonances.size() == 1);
    CHECK(rc.subspec.resonances[0] == ResonanceLabel(5, 2));
    CHECK(rc.dos.axes.b_stop == 2.0);
    CHECK(rc.dos.axes.e_stop == 100.0);
    CHECK(rc.dos.axes.window == 0.001);

    SECTION("the default schedule matches the solver's") {
        CHECK(rc.solver.solver().dtau_schedule == SolverConfig::default_schedule());
    }
}

TEST_CASE("field sweeps expand inclusively", "[config]") {
    RunConfig rc = RunConfig::from_text("[field]\nstart = 0.0\nstop = 0.1\nstep = 0.05\n");
    REQUIRE(rc.field.sweep);
    auto vals = rc.field.values();
    REQUIRE(vals.size() == 3);
    CHECK(vals[0] == Approx(0.0));
    CHECK(vals[1] == Approx(0.05));
    CHECK(vals[2] == Approx(0.1));

    SECTION("scalar and sweep cannot be mixed") {
        CHECK(error_text("[field]\nB = 1.0\nstart = 0\nstop = 1\nstep = 0.5\n") != "");
    }
    SECTION("a sweep needs all three bounds") {
        CHECK(error_text("[field]\nstart = 0\nstop = 1\n").find("start, stop, and step") !=
              std::string::npos);
    }
    SECTION("degenerate sweeps are rejected") {
        CHECK(error_text("[field]\nstart = 0\nstop = 1\nstep = 0\n") != "");
        CHECK(error_text("[field]\nstart = 2\nstop = 1\nstep = 0.5\n") != "");
    }
}

TEST_CASE("unknown sections and keys are rejected with line numbers", "[config]") {
    CHECK(error_text("[solvr]\ngrid = 64\n").find("unknown section [solvr]") != std::string::npos);
    std::string msg = error_text("[solver]\ngrid = 64\ngird = 128\n");
    CHECK(msg.find("unknown key 'gird'") != std::string::npos);
    CHECK(msg.find("line 3") != std::string::npos);
    CHECK(error_text("grid = 64\n").find("outside any [section]") != std::string::npos);
    CHECK(error_text("[solver]\ngrid = 64\ngrid = 128\n").find("duplicate key") !=
          std::string::npos);
    CHECK(error_text("[solver]\n[solver]\n").find("duplicate section") != std::string::npos);
    CHECK(error_text("[solver]\ngrid\n").find("expected 'key = value'") != std::string::npos);
    CHECK(error_text("[solver]\ngrid = sixty\n").find("expected a number") != std::string::npos);
}

TEST_CASE("ensemble choices are checked against the field", "[config]") {
    CHECK(error_text("[field]\nB = 0.5\n[stats]\nensemble = \"goe\"\n").find("assume zero field") !=
          std::string::npos);
    CHECK(error_text("[stats]\nensemble = \"gue\"\n").find("need a nonzero field") !=
          std::string::npos);
    CHECK(error_text("[stats]\nensemble = \"gse\"\n").find("must be auto, goe, or gue") !=
          std::string::npos);
    RunConfig ok = RunConfig::from_text("[field]\nB = 0.5\n[stats]\nensemble = \"gue\"\n");
    CHECK(ok.stats.resolve(ok.field.b) == EnsembleKind::GUE);
    // sweeps resolve per tuple, so explicit kinds pass at parse time
    RunConfig sweep =
        RunConfig::from_text("[field]\nstart = 0\nstop = 1\nstep = 0.5\n[stats]\nensemble = \"gue\"\n");
    CHECK(sweep.stats.resolve(0.0) == EnsembleKind::GUE);
}

TEST_CASE("solver block preconditions are enforced at parse time", "[config]") {
    CHECK(error_text("[solver]\ngrid = 96\n").find("power of two") != std::string::npos);
    CHECK(error_text("[solver]\nextent = -1\n").find("extent") != std::string::npos);
    CHECK(error_text("[solver]\nnum_states = 0\n") != "");
    CHECK(error_text("[solver]\ntol = 0\n") != "");
    CHECK(error_text("[solver]\ndtau_start = 1e-4\n").find("dtau_start > dtau_min") !=
          std::string::npos);
    CHECK(error_text("[stats]\nL_max = 31\n").find("(0, 30]") != std::string::npos);
    CHECK(error_text("[stats]\nbins = 4\n").find("at least 8") != std::string::npos);
    CHECK(error_text("[subspec]\nresonances = [\"5-2\"]\n").find("v_theta:v_r") !=
          std::string::npos);
    CHECK(error_text("[subspec]\nresonances = [\"0:2\"]\n") != "");
    CHECK(error_text("[sweep]\nM = []\n").find("must not be empty") != std::string::npos);
    CHECK(error_text("[sweep]\nseeds = [1.5]\n").find("non-negative integers") !=
          std::string::npos);
    CHECK(error_text("[dos]\nb_step = -0.01\n") != "");
}

TEST_CASE("unfolding model selection follows the source", "[config]") {
    RunConfig rc = RunConfig::from_text("");
    UnfoldMethod synth = rc.stats.method_for("synthetic:goe:42", rc.potential.n);
    CHECK(synth.kind == UnfoldMethod::Kind::Polynomial);
    UnfoldMethod solved = rc.stats.method_for("solve:abc123", rc.potential.n);
    CHECK(solved.kind == UnfoldMethod::Kind::ThomasFermi);
    CHECK(solved.well_exponent == 5.0);

    RunConfig forced = RunConfig::from_text("[stats]\nunfold = \"polynomial\"\n");
    CHECK(forced.stats.method_for("solve:abc123", 5.0).kind == UnfoldMethod::Kind::Polynomial);
}

TEST_CASE("missing config files raise io errors", "[config]") {
    try {
        RunConfig::from_file("/nonexistent/path/run.toml");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::IoError);
    }
}
