#include "scarlab/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

namespace scarlab::io {

static_assert(std::endian::native == std::endian::little,
              "containers are written little-endian without byte swapping");

namespace {

constexpr char kEigenMagic[6] = {'Q', 'S', 'C', 'R', '1', '\0'};
constexpr char kGridMagic[6] = {'Q', 'S', 'G', 'R', '1', '\0'};
constexpr char kDosMagic[6] = {'Q', 'S', 'D', 'M', '1', '\0'};

struct File {
    std::FILE* f = nullptr;
    std::string path;

    File(const std::string& p, const char* mode) : path(p) {
        f = std::fopen(p.c_str(), mode);
        if (!f) fail(ErrorCode::IoError, "cannot open " + p);
    }
    File(const File&) = delete;
    File& operator=(const File&) = delete;
    ~File() {
        if (f) std::fclose(f);
    }

    void finish() {
        if (std::fflush(f) != 0 || std::ferror(f)) fail(ErrorCode::IoError, "write failed: " + path);
        std::fclose(f);
        f = nullptr;
    }
    void expect_eof() {
        if (std::fgetc(f) != EOF) fail(ErrorCode::IoError, "trailing data in " + path);
    }
};

void put_bytes(File& f, const void* p, std::size_t n) {
    if (std::fwrite(p, 1, n, f.f) != n) fail(ErrorCode::IoError, "short write to " + f.path);
}

void get_bytes(File& f, void* p, std::size_t n) {
    if (std::fread(p, 1, n, f.f) != n) fail(ErrorCode::IoError, "unexpected end of " + f.path);
}

template <class T>
void put(File& f, T v) {
    put_bytes(f, &v, sizeof v);
}

template <class T>
T get(File& f) {
    T v;
    get_bytes(f, &v, sizeof v);
    return v;
}

void check_magic(File& f, const char (&magic)[6]) {
    char got[6];
    get_bytes(f, got, 6);
    if (std::memcmp(got, magic, 6) != 0)
        fail(ErrorCode::IoError, "bad magic bytes in " + f.path);
}

void put_text(File& f, const std::string& s) { put_bytes(f, s.data(), s.size()); }

Grid2D get_grid(File& f) {
    Grid2D g;
    g.nx = static_cast<int>(get<std::uint32_t>(f));
    g.ny = static_cast<int>(get<std::uint32_t>(f));
    g.x0 = get<double>(f);
    g.x1 = get<double>(f);
    g.y0 = get<double>(f);
    g.y1 = get<double>(f);
    g.validate();
    return g;
}

void put_grid(File& f, const Grid2D& g) {
    put<std::uint32_t>(f, static_cast<std::uint32_t>(g.nx));
    put<std::uint32_t>(f, static_cast<std::uint32_t>(g.ny));
    put<double>(f, g.x0);
    put<double>(f, g.x1);
    put<double>(f, g.y0);
    put<double>(f, g.y1);
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void write_eigenset(const std::string& path, const EigenSet& set) {
    set.validate();
    set.grid.validate();
    for (const auto& s : set.states)
        require(s.size() == set.grid.size(), ErrorCode::GridMismatch,
                "state length does not match the grid");

    File f(path, "wb");
    put_bytes(f, kEigenMagic, 6);
    put_grid(f, set.grid);
    put<double>(f, set.b_field);
    put<std::uint32_t>(f, static_cast<std::uint32_t>(set.energies.size()));
    for (std::size_t i = 0; i < set.energies.size(); ++i) {
        put<double>(f, set.energies[i]);
        put<double>(f, set.residuals[i]);
        put_bytes(f, set.states[i].data(), set.states[i].size() * sizeof(std::complex<double>));
    }
    f.finish();
}

EigenSet read_eigenset(const std::string& path) {
    File f(path, "rb");
    check_magic(f, kEigenMagic);
    EigenSet set;
    set.grid = get_grid(f);
    set.b_field = get<double>(f);
    const std::uint32_t k = get<std::uint32_t>(f);
    require(k <= 1000000u, ErrorCode::IoError, "implausible state count in " + path);
    const std::size_t n = set.grid.size();
    set.energies.resize(k);
    set.residuals.resize(k);
    set.states.resize(k);
    for (std::uint32_t i = 0; i < k; ++i) {
        set.energies[i] = get<double>(f);
        set.residuals[i] = get<double>(f);
        set.states[i].resize(n);
        get_bytes(f, set.states[i].data(), n * sizeof(std::complex<double>));
    }
    f.expect_eof();
    set.validate();
    return set;
}

void write_spectrum(const std::string& path, const Spectrum& spectrum) {
    spectrum.validate();
    require(!spectrum.source.empty() &&
                spectrum.source.find_first_of(" \t\r\n") == std::string::npos,
            ErrorCode::ConfigError, "spectrum source must be a single token");

    File f(path, "wb");
    put_text(f, "# scarlab spectrum v1 source=" + spectrum.source +
                    " hash=" + hex64(fnv1a64(spectrum.source)) + "\n");
    char buf[40];
    for (double e : spectrum.energies) {
        std::snprintf(buf, sizeof buf, "%.17g\n", e);
        put_text(f, buf);
    }
    f.finish();
}

Spectrum read_spectrum(const std::string& path) {
    File f(path, "rb");
    char line[256];
    if (!std::fgets(line, sizeof line, f.f))
        fail(ErrorCode::IoError, "empty spectrum file " + path);
    const char* prefix = "# scarlab spectrum v1 source=";
    if (std::strncmp(line, prefix, std::strlen(prefix)) != 0)
        fail(ErrorCode::IoError, "missing spectrum header in " + path);
    std::string rest = line + std::strlen(prefix);
    std::size_t sp = rest.find(' ');
    if (sp == std::string::npos || rest.compare(sp, 6, " hash=") != 0)
        fail(ErrorCode::IoError, "malformed spectrum header in " + path);
    Spectrum spectrum;
    spectrum.source = rest.substr(0, sp);
    std::string hash = rest.substr(sp + 6);
    while (!hash.empty() && (hash.back() == '\n' || hash.back() == '\r')) hash.pop_back();
    if (hash != hex64(fnv1a64(spectrum.source)))
        fail(ErrorCode::IoError, "source hash mismatch in " + path);

    while (std::fgets(line, sizeof line, f.f)) {
        char* end = nullptr;
        double v = std::strtod(line, &end);
        while (end && (*end == '\n' || *end == '\r' || *end == ' ')) ++end;
        if (end == line || *end != '\0')
            fail(ErrorCode::IoError, "malformed spectrum line in " + path);
        spectrum.energies.push_back(v);
    }
    spectrum.validate();
    return spectrum;
}

void write_potential_csv(const std::string& path, const PotentialGrid& pot) {
    pot.grid.validate();
    require(pot.v.size() == pot.grid.size(), ErrorCode::GridMismatch,
            "potential length does not match the grid");
    File f(path, "wb");
    put_text(f, "# scarlab potential v1\n");
    for (int i = 0; i < pot.grid.nx; ++i)
        for (int j = 0; j < pot.grid.ny; ++j) {
            put_text(f, format_double(pot.grid.x(i)) + "," + format_double(pot.grid.y(j)) + "," +
                            format_double(pot.v[pot.grid.idx(i, j)]) + "\n");
        }
    f.finish();
}

void write_potential(const std::string& path, const PotentialGrid& pot) {
    pot.grid.validate();
    require(pot.v.size() == pot.grid.size(), ErrorCode::GridMismatch,
            "potential length does not match the grid");
    File f(path, "wb");
    put_bytes(f, kGridMagic, 6);
    put_grid(f, pot.grid);
    put_bytes(f, pot.v.data(), pot.v.size() * sizeof(double));
    f.finish();
}

PotentialGrid read_potential(const std::string& path) {
    File f(path, "rb");
    check_magic(f, kGridMagic);
    PotentialGrid pot;
    pot.grid = get_grid(f);
    pot.v.resize(pot.grid.size());
    get_bytes(f, pot.v.data(), pot.v.size() * sizeof(double));
    f.expect_eof();
    return pot;
}

void write_dos_csv(const std::string& path, const DOSMap& map) {
    require(map.density.size() == map.b_axis.size() * map.e_axis.size(), ErrorCode::GridMismatch,
            "density matrix does not match its axes");
    File f(path, "wb");
    put_text(f, "# scarlab dos v1\n");
    for (std::size_t ib = 0; ib < map.b_axis.size(); ++ib)
        for (std::size_t ie = 0; ie < map.e_axis.size(); ++ie)
            put_text(f, format_double(map.b_axis[ib]) + "," + format_double(map.e_axis[ie]) + "," +
                            format_double(map.at(ib, ie)) + "\n");
    f.finish();
}

void write_dos_matrix(const std::string& path, const DOSMap& map) {
    require(map.density.size() == map.b_axis.size() * map.e_axis.size(), ErrorCode::GridMismatch,
            "density matrix does not match its axes");
    File f(path, "wb");
    put_bytes(f, kDosMagic, 6);
    put<std::uint32_t>(f, static_cast<std::uint32_t>(map.b_axis.size()));
    put<std::uint32_t>(f, static_cast<std::uint32_t>(map.e_axis.size()));
    put_bytes(f, map.b_axis.data(), map.b_axis.size() * sizeof(double));
    put_bytes(f, map.e_axis.data(), map.e_axis.size() * sizeof(double));
    put_bytes(f, map.density.data(), map.density.size() * sizeof(double));
    f.finish();
}

DOSMap read_dos_matrix(const std::string& path) {
    File f(path, "rb");
    check_magic(f, kDosMagic);
    DOSMap map;
    const std::uint32_t nb = get<std::uint32_t>(f);
    const std::uint32_t ne = get<std::uint32_t>(f);
    require(static_cast<std::uint64_t>(nb) * ne <= (1ull << 28), ErrorCode::IoError,
            "implausible matrix size in " + path);
    map.b_axis.resize(nb);
    map.e_axis.resize(ne);
    map.density.resize(static_cast<std::size_t>(nb) * ne);
    get_bytes(f, map.b_axis.data(), nb * sizeof(double));
    get_bytes(f, map.e_axis.data(), ne * sizeof(double));
    get_bytes(f, map.density.data(), map.density.size() * sizeof(double));
    f.expect_eof();
    return map;
}

void write_density_pgm(const std::string& path, const Grid2D& grid,
                       const std::vector<std::complex<double>>& state) {
    grid.validate();
    require(state.size() == grid.size(), ErrorCode::GridMismatch,
            "state length does not match the grid");

    double peak = 0.0;
    for (const auto& z : state) peak = std::max(peak, std::norm(z));
    const double scale = peak > 0.0 ? 65535.0 / peak : 0.0;

    File f(path, "wb");
    char head[160];
    std::snprintf(head, sizeof head, "P5\n# extent %s %s %s %s\n%d %d\n65535\n",
                  format_double(grid.x0).c_str(), format_double(grid.x1).c_str(),
                  format_double(grid.y0).c_str(), format_double(grid.y1).c_str(), grid.ny,
                  grid.nx);
    put_text(f, head);
    std::vector<unsigned char> row(static_cast<std::size_t>(grid.ny) * 2);
    for (int i = 0; i < grid.nx; ++i) {
        for (int j = 0; j < grid.ny; ++j) {
            const double w = std::norm(state[grid.idx(i, j)]) * scale;
            const unsigned v = static_cast<unsigned>(std::lround(w));
            row[2 * j] = static_cast<unsigned char>(v >> 8);
            row[2 * j + 1] = static_cast<unsigned char>(v & 0xff);
        }
        put_bytes(f, row.data(), row.size());
    }
    f.finish();
}

}  // namespace scarlab::io
