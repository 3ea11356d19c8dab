#include <catch2/catch.hpp>

#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "scarlab/io.hpp"

using namespace scarlab;
using cplx = std::complex<double>;

namespace {

std::string tmp_path(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "scarlab_io_tests";
    std::filesystem::create_directories(dir);
    return (dir / name).string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

EigenSet sample_set() {
    EigenSet set;
    set.grid = Grid2D{4, 4, -1.0, 1.0, -2.0, 2.0};
    set.b_field = 0.75;
    set.energies = {1.25, 3.5};
    set.residuals = {1e-8, 2e-7};
    set.states.resize(2, std::vector<cplx>(16));
    for (int s = 0; s < 2; ++s)
        for (int i = 0; i < 16; ++i)
            set.states[s][i] = cplx(0.1 * i + s, -0.25 * i / 3.0);
    set.convergence_trace = {{5.0, 4.0}, {3.9}};
    return set;
}

}  // namespace

TEST_CASE("eigenstate container round-trips bitwise", "[io]") {
    const std::string path = tmp_path("set.qscr");
    EigenSet set = sample_set();
    io::write_eigenset(path, set);

    EigenSet back = io::read_eigenset(path);
    CHECK(back.grid == set.grid);
    CHECK(back.b_field == set.b_field);
    CHECK(back.energies == set.energies);
    CHECK(back.residuals == set.residuals);
    CHECK(back.states == set.states);
    CHECK(back.convergence_trace.empty());

    SECTION("writes are deterministic") {
        const std::string again = tmp_path("set2.qscr");
        io::write_eigenset(again, set);
        CHECK(slurp(path) == slurp(again));
    }
    SECTION("magic bytes are checked") {
        std::string bytes = slurp(path);
        bytes[0] = 'X';
        std::ofstream(path, std::ios::binary) << bytes;
        CHECK_THROWS_AS(io::read_eigenset(path), Error);
    }
    SECTION("truncation is detected") {
        std::string bytes = slurp(path);
        bytes.resize(bytes.size() - 9);
        std::ofstream(path, std::ios::binary) << bytes;
        CHECK_THROWS_AS(io::read_eigenset(path), Error);
    }
    SECTION("trailing bytes are detected") {
        std::string bytes = slurp(path) + "x";
        std::ofstream(path, std::ios::binary) << bytes;
        CHECK_THROWS_AS(io::read_eigenset(path), Error);
    }
    SECTION("state lengths are validated on write") {
        set.states[1].pop_back();
        CHECK_THROWS_AS(io::write_eigenset(path, set), Error);
    }
}

TEST_CASE("spectrum files round-trip exactly", "[io]") {
    const std::string path = tmp_path("spec.csv");
    Spectrum s;
    s.source = "synthetic:goe:42";
    s.energies = {-2.5, 0.1, 1.0 / 3.0, 0.3333333333333333, 1e-15, 12345.678901234567};
    std::sort(s.energies.begin(), s.energies.end());
    io::write_spectrum(path, s);

    Spectrum back = io::read_spectrum(path);
    CHECK(back.source == s.source);
    REQUIRE(back.energies.size() == s.energies.size());
    for (std::size_t i = 0; i < s.energies.size(); ++i)
        CHECK(back.energies[i] == s.energies[i]);  // bit-exact

    SECTION("header carries a checked source hash") {
        std::string text = slurp(path);
        CHECK(text.rfind("# scarlab spectrum v1 source=synthetic:goe:42 hash=", 0) == 0);
        auto pos = text.find("hash=") + 5;
        text[pos] = text[pos] == '0' ? '1' : '0';
        std::ofstream(path, std::ios::binary) << text;
        CHECK_THROWS_AS(io::read_spectrum(path), Error);
    }
    SECTION("missing header is rejected") {
        std::ofstream(path, std::ios::binary) << "1.0\n2.0\n";
        CHECK_THROWS_AS(io::read_spectrum(path), Error);
    }
    SECTION("garbage lines are rejected") {
        std::string text = slurp(path) + "not-a-number\n";
        std::ofstream(path, std::ios::binary) << text;
        CHECK_THROWS_AS(io::read_spectrum(path), Error);
    }
    SECTION("sources with spaces are refused") {
        s.source = "two words";
        CHECK_THROWS_AS(io::write_spectrum(path, s), Error);
    }
}

TEST_CASE("potential containers round-trip", "[io]") {
    PotentialGrid pot;
    pot.grid = Grid2D{4, 2, -1.0, 1.0, -1.0, 1.0};
    pot.v = {0.0, 0.125, 1.0 / 3.0, 0.5, 1.5, 2.25, 3.0, 4.75};

    const std::string bin = tmp_path("pot.qsgr");
    io::write_potential(bin, pot);
    PotentialGrid back = io::read_potential(bin);
    CHECK(back.grid == pot.grid);
    CHECK(back.v == pot.v);

    const std::string csv = tmp_path("pot.csv");
    io::write_potential_csv(csv, pot);
    std::string text = slurp(csv);
    CHECK(text.rfind("# scarlab potential v1\n-1,-1,0\n", 0) == 0);
    CHECK(text.find("\n-0.5,0,0.5\n") != std::string::npos);
}

TEST_CASE("dos exports round-trip and enumerate triplets", "[io]") {
    DOSMap map;
    map.b_axis = {0.0, 0.5};
    map.e_axis = {1.0, 2.0, 3.0};
    map.density = {0.1, 0.2, 0.3, 0.4, 0.5, 1.0 / 7.0};

    const std::string bin = tmp_path("dos.qsdm");
    io::write_dos_matrix(bin, map);
    DOSMap back = io::read_dos_matrix(bin);
    CHECK(back.b_axis == map.b_axis);
    CHECK(back.e_axis == map.e_axis);
    CHECK(back.density == map.density);

    const std::string csv = tmp_path("dos.csv");
    io::write_dos_csv(csv, map);
    std::string text = slurp(csv);
    CHECK(text.rfind("# scarlab dos v1\n0,1,0.1\n", 0) == 0);
    int lines = 0;
    for (char c : text)
        if (c == '\n') ++lines;
    CHECK(lines == 7);
}

TEST_CASE("density images are 16-bit graymaps", "[io]") {
    Grid2D g{2, 3, -1.0, 1.0, -1.5, 1.5};
    std::vector<cplx> state = {{0, 0}, {0.5, 0}, {0, 1.0}, {0.25, 0.25}, {0, 0}, {-0.5, 0}};
    const std::string path = tmp_path("dens.pgm");
    io::write_density_pgm(path, g, state);

    std::string bytes = slurp(path);
    CHECK(bytes.rfind("P5\n# extent -1 1 -1.5 1.5\n3 2\n65535\n", 0) == 0);
    const std::size_t data = bytes.size() - 12;  // 2 rows x 3 cols x 2 bytes
    std::string pix = bytes.substr(data);
    // brightest cell (|i|^2 = 1) maps to 65535 = 0xffff
    CHECK(static_cast<unsigned char>(pix[2 * 2]) == 0xff);
    CHECK(static_cast<unsigned char>(pix[2 * 2 + 1]) == 0xff);
    // zero cells map to zero
    CHECK(pix[0] == 0);
    CHECK(pix[1] == 0);

    SECTION("an all-zero state is representable") {
        std::vector<cplx> null(state.size(), cplx(0, 0));
        io::write_density_pgm(path, g, null);
        std::string z = slurp(path);
        for (std::size_t i = z.size() - 12; i < z.size(); ++i) CHECK(z[i] == 0);
    }
}

TEST_CASE("number formatting survives round-trips", "[io]") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -0.0, 2.0, 1e17, 123456.7890123}) {
        std::string text = io::format_double(v);
        CHECK(std::strtod(text.c_str(), nullptr) == v);
    }
    CHECK(io::format_double(0.5) == "0.5");
    CHECK(io::format_double(2.0) == "2");
}

TEST_CASE("config hashing matches reference vectors", "[io]") {
    CHECK(io::fnv1a64("") == 0xcbf29ce484222325ull);
    CHECK(io::fnv1a64("a") == 0xaf63dc4c8601ec8cull);
    CHECK(io::hex64(0xcbf29ce484222325ull) == "cbf29ce484222325");
    CHECK(io::hex64(0x1ull) == "0000000000000001");
}
