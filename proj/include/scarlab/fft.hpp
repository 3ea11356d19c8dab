#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace scarlab::fft {

// Allocator backed by fftw_malloc so every buffer shares the alignment the
// cached plans were created with (required for the new-array execute API).
template <class T>
struct FFTWAllocator {
    using value_type = T;
    FFTWAllocator() = default;
    template <class U>
    FFTWAllocator(const FFTWAllocator<U>&) {}
    T* allocate(std::size_t n);
    void deallocate(T* p, std::size_t) noexcept;
    bool operator==(const FFTWAllocator&) const { return true; }
};

template <class T>
using aligned_vector = std::vector<T, FFTWAllocator<T>>;

using cplx = std::complex<double>;

// All transforms act on row-major nx-by-ny data with the x index outermost.
// Plans are created once per shape with FFTW_ESTIMATE (deterministic plan
// choice) and reused via the new-array interface; execution is thread-safe,
// plan creation is serialized internally.

// In-place 2D complex transforms, unnormalized (inverse leaves a factor nx*ny).
void forward_2d(int nx, int ny, cplx* data);
void inverse_2d(int nx, int ny, cplx* data);

// In-place batched 1D complex transforms over every line along one axis.
void forward_x(int nx, int ny, cplx* data);
void inverse_x(int nx, int ny, cplx* data);
void forward_y(int nx, int ny, cplx* data);
void inverse_y(int nx, int ny, cplx* data);

// Out-of-place real transforms: spectrum holds nx*(ny/2+1) coefficients.
// inverse_real destroys the spectrum buffer (standard c2r behavior) and is
// unnormalized like the complex inverse.
void forward_real(int nx, int ny, const double* data, cplx* spectrum);
void inverse_real(int nx, int ny, cplx* spectrum, double* data);

// Angular wavenumber for index i of an m-point transform on a length-l domain.
double wavenumber(int i, int m, double l);

}  // namespace scarlab::fft
