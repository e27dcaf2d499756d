#include "ofdmrad/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace ofdmrad {
namespace fft {

namespace {

// Plan creation is not thread-safe in FFTW; executing a cached plan on new
// arrays is. Plans are created once per (size, sign) on aligned scratch
// buffers and reused via fftw_execute_dft.
class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache c;
        return c;
    }

    fftw_plan get(int n, int sign) {
        std::lock_guard<std::mutex> lock(mu_);
        auto key = std::make_pair(n, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        CVec in(n), out(n);
        // FFTW_UNALIGNED: plans stay valid for matrix-column pointers whose
        // byte offset depends on the row count.
        fftw_plan p = fftw_plan_dft_1d(n,
                                       reinterpret_cast<fftw_complex*>(in.data()),
                                       reinterpret_cast<fftw_complex*>(out.data()),
                                       sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(key, p);
        return p;
    }

private:
    PlanCache() = default;
    ~PlanCache() {
        for (auto& [k, p] : plans_) fftw_destroy_plan(p);
    }
    std::mutex mu_;
    std::map<std::pair<int, int>, fftw_plan> plans_;
};

void exec(const cd* in, cd* out, int n, int sign) {
    fftw_plan p = PlanCache::instance().get(n, sign);
    if (in == out) {
        // fftw_execute_dft requires matching in-place-ness with the plan; copy instead.
        CVec tmp(in, in + n);
        fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(tmp.data()),
                         reinterpret_cast<fftw_complex*>(out));
    } else {
        fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<cd*>(in)),
                         reinterpret_cast<fftw_complex*>(out));
    }
}

} // namespace

void dft(const cd* in, cd* out, int n) { exec(in, out, n, FFTW_FORWARD); }
void idft(const cd* in, cd* out, int n) { exec(in, out, n, FFTW_BACKWARD); }

void dft(const CVec& in, CVec& out) {
    out.resize(in.size());
    dft(in.data(), out.data(), static_cast<int>(in.size()));
}

void idft(const CVec& in, CVec& out) {
    out.resize(in.size());
    idft(in.data(), out.data(), static_cast<int>(in.size()));
}

int next_pow2(int n) {
    int p = 1;
    while (p < n) p <<= 1;
    return p;
}

} // namespace fft
} // namespace ofdmrad
