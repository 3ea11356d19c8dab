// Times the OpenMP kernels against their serial references and checks that
// the outputs agree bitwise.  Build target only; not part of the test suite.

#include <chrono>
#include <cstdio>
#include <functional>

#include <omp.h>

#include "scarlab/serial_ref.hpp"
#include "scarlab/spectra.hpp"

using namespace scarlab;
using cplx = std::complex<double>;

namespace {

double time_ms(const std::function<void()>& fn) {
    double best = 1e300;
    for (int rep = 0; rep < 3; ++rep) {
        auto t0 = std::chrono::steady_clock::now();
        fn();
        auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

void report(const char* name, double serial_ms, double parallel_ms, bool match) {
    std::printf("%-18s %10.2f ms %10.2f ms %8.2fx   %s\n", name, serial_ms, parallel_ms,
                serial_ms / parallel_ms, match ? "bitwise match" : "MISMATCH");
}

}  // namespace

int main() {
    std::printf("threads: %d\n", omp_get_max_threads());
    std::printf("%-18s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

    {
        PotentialSpec spec;
        spec.n = 5.0;
        spec.M = 20.0;
        spec.sigma = 0.08;
        spec.seed = 3;
        Grid2D g = Grid2D::centered(256, 256, 4.5);
        BumpField bumps = generate_bumps(
            spec,
            default_bump_region(spec, eval_external_potential(spec, g.half_extent_x(), 0.0)));
        PotentialGrid par, ser;
        double tp = time_ms([&] { par = build_potential_grid(spec, g, bumps); });
        double ts = time_ms([&] { ser = serial_ref::build_potential_grid(spec, g, bumps); });
        report("potential", ts, tp, par.v == ser.v);
    }
    {
        Spectrum s = synth_spectrum(EnsembleKind::GOE, 4000, 11);
        UnfoldedSpectrum u = unfold(s, UnfoldMethod::polynomial());
        std::vector<double> ls;
        for (double l = 0.5; l <= 30.0; l += 0.25) ls.push_back(l);
        Delta3Curve par, ser;
        double tp = time_ms([&] { par = delta3(u, ls); });
        double ts = time_ms([&] { ser = serial_ref::delta3(u, ls); });
        report("rigidity", ts, tp, par.delta3 == ser.delta3);
    }
    {
        DOSAxes ax;
        ax.b_stop = 1.0;
        ax.b_step = 0.02;
        ax.e_stop = 60.0;
        ax.e_step = 0.1;
        ax.window = 0.01;
        DOSMap par, ser;
        double tp = time_ms([&] { par = dos_map(1.0, ax); });
        double ts = time_ms([&] { ser = serial_ref::dos_map(1.0, ax); });
        report("dos map", ts, tp, par.density == ser.density);
    }
    {
        PotentialSpec spec;
        spec.n = 2.0;
        Grid2D g = Grid2D::centered(128, 128, 8.0);
        SolverConfig cfg;
        std::vector<BasisState> basis =
            build_unperturbed_basis(spec, g, 0.0, 12.0, 8.0, {}, 0, cfg);
        std::vector<cplx> psi(g.size());
        for (std::size_t i = 0; i < psi.size(); ++i)
            psi[i] = 0.6 * basis[0].values[i] + cplx(0.0, 0.8) * basis[1].values[i];
        Subspectrum par, ser;
        double tp = time_ms([&] { par = overlaps(psi, g, basis, 1e-6); });
        double ts = time_ms([&] { ser = serial_ref::overlaps(psi, g, basis, 1e-6); });
        bool match = par.completeness == ser.completeness && par.weights.size() == ser.weights.size();
        for (std::size_t i = 0; match && i < par.weights.size(); ++i)
            match = par.weights[i].coeff == ser.weights[i].coeff;
        report("overlaps", ts, tp, match);
    }
    return 0;
}
