#pragma once

#include <fftw3.h>
#include <omp.h>

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "torusflux/grid.hpp"

namespace torusflux {

// Shared FFTW plans per grid size. Transforms run on cached aligned buffers
// behind a mutex; FFTW's own OpenMP threading parallelizes the transform.
class Fft {
  public:
    static Fft& get(int n) {
        static std::mutex reg_mutex;
        static std::map<int, std::unique_ptr<Fft>> registry;
        std::lock_guard lock(reg_mutex);
        auto& slot = registry[n];
        if (!slot) slot.reset(new Fft(n));
        return *slot;
    }

    std::size_t n_complex() const { return std::size_t(n_) * n_ * (n_ / 2 + 1); }

    // physical (n^3 reals) -> spectral (Hermitian half-space), normalized so that
    // out[k] is the coefficient of e^{2*pi*i k.x}.
    void forward(const double* in, cplx* out) {
        std::lock_guard lock(mutex_);
        std::copy(in, in + std::size_t(n_) * n_ * n_, real_buf_);
        fftw_execute(fwd_);
        const double scale = 1.0 / (double(n_) * n_ * n_);
        auto* c = reinterpret_cast<cplx*>(cplx_buf_);
        const std::size_t m = n_complex();
        for (std::size_t i = 0; i < m; ++i) out[i] = c[i] * scale;
    }

    // spectral -> physical
    void backward(const cplx* in, double* out) {
        std::lock_guard lock(mutex_);
        auto* c = reinterpret_cast<cplx*>(cplx_buf_);
        std::copy(in, in + n_complex(), c);
        fftw_execute(bwd_);
        std::copy(real_buf_, real_buf_ + std::size_t(n_) * n_ * n_, out);
    }

    ~Fft() {
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(real_buf_);
        fftw_free(cplx_buf_);
    }

  private:
    explicit Fft(int n) : n_(n) {
        static std::once_flag once;
        std::call_once(once, [] {
            fftw_init_threads();
            fftw_plan_with_nthreads(omp_get_max_threads());
        });
        real_buf_ = fftw_alloc_real(std::size_t(n) * n * n);
        cplx_buf_ = fftw_alloc_complex(n_complex());
        fwd_ = fftw_plan_dft_r2c_3d(n, n, n, real_buf_, cplx_buf_, FFTW_MEASURE);
        bwd_ = fftw_plan_dft_c2r_3d(n, n, n, cplx_buf_, real_buf_, FFTW_MEASURE);
    }

    int n_;
    std::mutex mutex_;
    double* real_buf_;
    fftw_complex* cplx_buf_;
    fftw_plan fwd_, bwd_;
};

}  // namespace torusflux
