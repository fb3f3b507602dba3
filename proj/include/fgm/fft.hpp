//==============================================================================
// fft.hpp
// Thin FFTW wrapper for real transforms on periodic grids.
// - Plans are cached per size in a process-wide registry; the FFTW planner is
//   not thread-safe, so plan creation is serialized. Execution uses the
//   new-array interface and caller-owned buffers, which is thread-safe.
// - Plans are created with FFTW_ESTIMATE | FFTW_UNALIGNED so they can run on
//   any std::vector storage.
// - forward: real n -> complex n/2+1 (unnormalized); backward divides by n.
//==============================================================================
#pragma once

#include <complex>
#include <map>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "fgm/errors.hpp"

namespace fgm {

class RealFft {
  public:
    explicit RealFft(std::size_t n) : n_(n) {
        auto& e = entry(n);
        fwd_ = e.fwd;
        bwd_ = e.bwd;
    }

    std::size_t size() const { return n_; }
    std::size_t spectrum_size() const { return n_ / 2 + 1; }

    void forward(const double* in, std::complex<double>* out) const {
        fftw_execute_dft_r2c(fwd_, const_cast<double*>(in),
                             reinterpret_cast<fftw_complex*>(out));
    }
    // destroys `in` per FFTW c2r contract; callers pass scratch
    void backward(std::complex<double>* in, double* out) const {
        fftw_execute_dft_c2r(bwd_, reinterpret_cast<fftw_complex*>(in), out);
        const double inv = 1.0 / static_cast<double>(n_);
        for (std::size_t i = 0; i < n_; ++i) out[i] *= inv;
    }

  private:
    struct PlanPair {
        fftw_plan fwd = nullptr;
        fftw_plan bwd = nullptr;
    };

    static PlanPair& entry(std::size_t n) {
        static std::mutex mtx;
        static std::map<std::size_t, PlanPair> cache;
        std::lock_guard<std::mutex> lock(mtx);
        auto it = cache.find(n);
        if (it != cache.end()) return it->second;

        std::vector<double> re(n);
        std::vector<std::complex<double>> sp(n / 2 + 1);
        PlanPair p;
        p.fwd = fftw_plan_dft_r2c_1d(static_cast<int>(n), re.data(),
                                     reinterpret_cast<fftw_complex*>(sp.data()),
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
        p.bwd = fftw_plan_dft_c2r_1d(static_cast<int>(n),
                                     reinterpret_cast<fftw_complex*>(sp.data()), re.data(),
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!p.fwd || !p.bwd) throw numerical_error("RealFft: FFTW plan creation failed");
        return cache.emplace(n, p).first->second;
    }

    std::size_t n_;
    fftw_plan fwd_;
    fftw_plan bwd_;
};

} // namespace fgm
