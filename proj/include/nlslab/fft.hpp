#pragma once

// Thin FFTW wrapper. Plans are created once per length and shared; execution
// goes through the new-array interface, which FFTW documents as thread safe.

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include <fftw3.h>

namespace nlslab::fft {

using cplx = std::complex<double>;

class Plan {
public:
    explicit Plan(int n) : n_(n) {
        std::vector<cplx> a(n), b(n);
        auto* in = reinterpret_cast<fftw_complex*>(a.data());
        auto* out = reinterpret_cast<fftw_complex*>(b.data());
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        forward_ = fftw_plan_dft_1d(n, in, out, FFTW_FORWARD, flags);
        backward_ = fftw_plan_dft_1d(n, in, out, FFTW_BACKWARD, flags);
    }
    Plan(const Plan&) = delete;
    Plan& operator=(const Plan&) = delete;
    ~Plan() {
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
    }

    int size() const { return n_; }

    void forward(std::span<const cplx> in, std::span<cplx> out) const {
        fftw_execute_dft(forward_, as_fftw(in), reinterpret_cast<fftw_complex*>(out.data()));
    }
    // Unnormalized inverse; callers divide by n.
    void backward(std::span<const cplx> in, std::span<cplx> out) const {
        fftw_execute_dft(backward_, as_fftw(in), reinterpret_cast<fftw_complex*>(out.data()));
    }

private:
    static fftw_complex* as_fftw(std::span<const cplx> s) {
        // out-of-place complex DFTs preserve their input
        return reinterpret_cast<fftw_complex*>(const_cast<cplx*>(s.data()));
    }

    int n_;
    fftw_plan forward_{};
    fftw_plan backward_{};
};

inline const Plan& plan_for(int n) {
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<Plan>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<Plan>(n);
    return *slot;
}

inline std::vector<cplx> forward(std::span<const cplx> in) {
    std::vector<cplx> out(in.size());
    plan_for(static_cast<int>(in.size())).forward(in, out);
    return out;
}

/// Normalized inverse transform.
inline std::vector<cplx> inverse(std::span<const cplx> in) {
    std::vector<cplx> out(in.size());
    plan_for(static_cast<int>(in.size())).backward(in, out);
    const double scale = 1.0 / static_cast<double>(in.size());
    for (auto& v : out) v *= scale;
    return out;
}

} // namespace nlslab::fft
