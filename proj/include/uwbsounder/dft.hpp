#pragma once

// Thin FFTW wrapper. Plans are created once per (size, direction) under a
// lock; execution uses the new-array interface so it is safe to call from
// several threads at once.

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

namespace uwbs::dft {

using cvec = std::vector<std::complex<double>>;

namespace detail {

class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int n, int sign) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    auto* in = fftw_alloc_complex(static_cast<std::size_t>(n));
    auto* out = fftw_alloc_complex(static_cast<std::size_t>(n));
    fftw_plan plan = fftw_plan_dft_1d(n, in, out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
    plans_.emplace(key, plan);
    return plan;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

inline cvec execute(std::span<const std::complex<double>> x, int sign) {
  cvec in(x.begin(), x.end());
  cvec out(x.size());
  if (x.empty()) return out;
  fftw_plan plan = PlanCache::instance().get(static_cast<int>(x.size()), sign);
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

}  // namespace detail

/// X[k] = sum_n x[n] exp(-j 2 pi k n / N), unnormalized.
inline cvec forward(std::span<const std::complex<double>> x) {
  return detail::execute(x, FFTW_FORWARD);
}

/// x[n] = (1/N) sum_k X[k] exp(+j 2 pi k n / N).
inline cvec inverse(std::span<const std::complex<double>> x) {
  auto out = detail::execute(x, FFTW_BACKWARD);
  const double scale = out.empty() ? 1.0 : 1.0 / static_cast<double>(out.size());
  for (auto& v : out) v *= scale;
  return out;
}

}  // namespace uwbs::dft
