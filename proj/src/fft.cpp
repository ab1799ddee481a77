// Thin FFTW wrapper. Plans are cached per transform size, created under a
// mutex (the FFTW planner is not thread-safe) and executed through the
// new-array interface so concurrent slice workers can share them.

#include "muskat/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>

namespace muskat::fft {

namespace {

struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

// Read-mostly plan cache: transforms of a known size take only a shared
// lock, so concurrent slice workers do not serialize here.
std::shared_mutex g_planner_mutex;
std::map<std::size_t, PlanPair>& plan_cache() {
    static std::map<std::size_t, PlanPair> cache;
    return cache;
}

PlanPair get_plans(std::size_t n) {
    {
        std::shared_lock lock(g_planner_mutex);
        auto& cache = plan_cache();
        auto it = cache.find(n);
        if (it != cache.end()) return it->second;
    }
    std::unique_lock lock(g_planner_mutex);
    auto& cache = plan_cache();
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    std::vector<cplx> probe(n);
    auto* buf = reinterpret_cast<fftw_complex*>(probe.data());
    PlanPair p;
    // FFTW_UNALIGNED lets us execute on plain std::vector storage later.
    p.fwd = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_FORWARD,
                             FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.bwd = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_BACKWARD,
                             FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!p.fwd || !p.bwd) throw std::runtime_error("fftw plan creation failed");
    cache.emplace(n, p);
    return p;
}

}  // namespace

std::vector<cplx> forward(const std::vector<cplx>& samples) {
    const std::size_t n = samples.size();
    PlanPair plans = get_plans(n);
    std::vector<cplx> out(samples);
    auto* buf = reinterpret_cast<fftw_complex*>(out.data());
    fftw_execute_dft(plans.fwd, buf, buf);
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& v : out) v *= scale;
    return out;
}

std::vector<cplx> inverse(const std::vector<cplx>& coeffs) {
    const std::size_t n = coeffs.size();
    PlanPair plans = get_plans(n);
    std::vector<cplx> out(coeffs);
    auto* buf = reinterpret_cast<fftw_complex*>(out.data());
    fftw_execute_dft(plans.bwd, buf, buf);
    return out;
}

}  // namespace muskat::fft
