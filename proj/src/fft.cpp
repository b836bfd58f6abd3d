#include "tvclt/fft.hpp"

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>

#include "tvclt/errors.hpp"
#include "tvclt/grid.hpp"

namespace tvclt::fft {

namespace {

// FFTW's planner is not thread-safe; plans are created once per size under a
// lock (FFTW_ESTIMATE keeps plan selection deterministic) and executed via
// the new-array interface on per-call buffers.
struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;
};

std::mutex g_mu;
std::map<std::size_t, PlanPair>& plan_cache() {
    static std::map<std::size_t, PlanPair> cache;
    return cache;
}

PlanPair plans_for(std::size_t n) {
    std::lock_guard<std::mutex> g(g_mu);
    auto& cache = plan_cache();
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<double> re(n, 0.0);
    std::vector<std::complex<double>> cx(n / 2 + 1);
    PlanPair p;
    p.fwd = fftw_plan_dft_r2c_1d(static_cast<int>(n), re.data(),
                                 reinterpret_cast<fftw_complex*>(cx.data()),
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.inv = fftw_plan_dft_c2r_1d(static_cast<int>(n),
                                 reinterpret_cast<fftw_complex*>(cx.data()),
                                 re.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache[n] = p;
    return p;
}

}  // namespace

std::vector<double> linear_convolution(const std::vector<double>& a,
                                       const std::vector<double>& b) {
    if (a.size() != b.size() || !is_power_of_two(a.size()))
        throw ValidationError("convolution inputs must share a power-of-two length");
    const std::size_t m = a.size();
    const std::size_t n = 2 * m;
    const PlanPair p = plans_for(n);

    std::vector<double> pa(n, 0.0), pb(n, 0.0);
    std::copy(a.begin(), a.end(), pa.begin());
    std::copy(b.begin(), b.end(), pb.begin());
    std::vector<std::complex<double>> fa(n / 2 + 1), fb(n / 2 + 1);
    fftw_execute_dft_r2c(p.fwd, pa.data(),
                         reinterpret_cast<fftw_complex*>(fa.data()));
    fftw_execute_dft_r2c(p.fwd, pb.data(),
                         reinterpret_cast<fftw_complex*>(fb.data()));
    for (std::size_t i = 0; i < fa.size(); ++i) fa[i] *= fb[i];
    std::vector<double> out(n, 0.0);
    fftw_execute_dft_c2r(p.inv, reinterpret_cast<fftw_complex*>(fa.data()),
                         out.data());
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& v : out) v *= scale;
    return out;
}

}  // namespace tvclt::fft
