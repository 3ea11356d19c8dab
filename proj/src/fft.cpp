#include "scarlab/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <new>
#include <tuple>

#include "scarlab/error.hpp"

namespace scarlab::fft {

template <class T>
T* FFTWAllocator<T>::allocate(std::size_t n) {
    void* p = fftw_malloc(n * sizeof(T));
    if (!p) throw std::bad_alloc();
    return static_cast<T*>(p);
}

template <class T>
void FFTWAllocator<T>::deallocate(T* p, std::size_t) noexcept {
    fftw_free(p);
}

template struct FFTWAllocator<double>;
template struct FFTWAllocator<cplx>;

namespace {

enum class Kind { C2dFwd, C2dBwd, CxFwd, CxBwd, CyFwd, CyBwd, R2C, C2R };

struct PlanCache {
    std::map<std::tuple<Kind, int, int>, fftw_plan> plans;
    std::mutex mutex;

    ~PlanCache() {
        for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
    }

    fftw_plan get(Kind kind, int nx, int ny) {
        std::scoped_lock lock(mutex);
        auto key = std::make_tuple(kind, nx, ny);
        auto it = plans.find(key);
        if (it != plans.end()) return it->second;

        // Plan on scratch buffers with the allocator's alignment; ESTIMATE
        // keeps plan selection independent of runtime measurements.
        const std::size_t n = static_cast<std::size_t>(nx) * ny;
        aligned_vector<cplx> a(n), b(n);
        auto* ap = reinterpret_cast<fftw_complex*>(a.data());
        aligned_vector<double> r(n);
        fftw_plan plan = nullptr;
        switch (kind) {
            case Kind::C2dFwd:
                plan = fftw_plan_dft_2d(nx, ny, ap, ap, FFTW_FORWARD, FFTW_ESTIMATE);
                break;
            case Kind::C2dBwd:
                plan = fftw_plan_dft_2d(nx, ny, ap, ap, FFTW_BACKWARD, FFTW_ESTIMATE);
                break;
            case Kind::CxFwd:
            case Kind::CxBwd: {
                // ny transforms of length nx, stride ny apart, unit distance.
                int len = nx;
                int sign = kind == Kind::CxFwd ? FFTW_FORWARD : FFTW_BACKWARD;
                plan = fftw_plan_many_dft(1, &len, ny, ap, nullptr, ny, 1, ap, nullptr, ny, 1,
                                          sign, FFTW_ESTIMATE);
                break;
            }
            case Kind::CyFwd:
            case Kind::CyBwd: {
                int len = ny;
                int sign = kind == Kind::CyFwd ? FFTW_FORWARD : FFTW_BACKWARD;
                plan = fftw_plan_many_dft(1, &len, nx, ap, nullptr, 1, ny, ap, nullptr, 1, ny,
                                          sign, FFTW_ESTIMATE);
                break;
            }
            case Kind::R2C:
                plan = fftw_plan_dft_r2c_2d(nx, ny, r.data(), ap, FFTW_ESTIMATE);
                break;
            case Kind::C2R:
                plan = fftw_plan_dft_c2r_2d(nx, ny, ap, r.data(), FFTW_ESTIMATE);
                break;
        }
        require(plan != nullptr, ErrorCode::ProblemTooLarge, "FFT planning failed");
        plans.emplace(key, plan);
        return plan;
    }
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

void run_c2c(Kind kind, int nx, int ny, cplx* data) {
    fftw_plan plan = cache().get(kind, nx, ny);
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(plan, p, p);
}

}  // namespace

void forward_2d(int nx, int ny, cplx* data) { run_c2c(Kind::C2dFwd, nx, ny, data); }
void inverse_2d(int nx, int ny, cplx* data) { run_c2c(Kind::C2dBwd, nx, ny, data); }
void forward_x(int nx, int ny, cplx* data) { run_c2c(Kind::CxFwd, nx, ny, data); }
void inverse_x(int nx, int ny, cplx* data) { run_c2c(Kind::CxBwd, nx, ny, data); }
void forward_y(int nx, int ny, cplx* data) { run_c2c(Kind::CyFwd, nx, ny, data); }
void inverse_y(int nx, int ny, cplx* data) { run_c2c(Kind::CyBwd, nx, ny, data); }

void forward_real(int nx, int ny, const double* data, cplx* spectrum) {
    fftw_plan plan = cache().get(Kind::R2C, nx, ny);
    fftw_execute_dft_r2c(plan, const_cast<double*>(data),
                         reinterpret_cast<fftw_complex*>(spectrum));
}

void inverse_real(int nx, int ny, cplx* spectrum, double* data) {
    fftw_plan plan = cache().get(Kind::C2R, nx, ny);
    fftw_execute_dft_c2r(plan, reinterpret_cast<fftw_complex*>(spectrum), data);
}

double wavenumber(int i, int m, double l) {
    int f = i <= m / 2 ? i : i - m;
    return 2.0 * M_PI * f / l;
}

}  // namespace scarlab::fft
