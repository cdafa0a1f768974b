#include "hexwave/util.hpp"

#include <fftw3.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <map>
#include <mutex>
#include <thread>
#include <tuple>

namespace hexwave {

int worker_count() {
  if (const char* s = std::getenv("HEXWAVE_THREADS")) {
    int n = std::atoi(s);
    if (n >= 1) return n;
  }
  unsigned h = std::thread::hardware_concurrency();
  return h ? int(std::min(h, 16u)) : 1;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f) {
  int w = std::min<std::size_t>(worker_count(), n);
  if (w <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < w; ++t)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) f(i);
    });
  for (auto& th : pool) th.join();
}

namespace {
std::mutex plan_mu;
std::map<std::tuple<int, int, bool>, fftw_plan> plans;

fftw_plan get_plan(int n1, int n2, bool inverse) {
  std::lock_guard<std::mutex> lk(plan_mu);
  auto key = std::make_tuple(n1, n2, inverse);
  auto it = plans.find(key);
  if (it != plans.end()) return it->second;
  std::vector<cplx> tmp(std::size_t(n1) * n2);
  auto* p = reinterpret_cast<fftw_complex*>(tmp.data());
  fftw_plan pl = fftw_plan_dft_2d(n1, n2, p, p, inverse ? FFTW_BACKWARD : FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  plans[key] = pl;
  return pl;
}
}  // namespace

void fft2(std::vector<cplx>& a, int n1, int n2, bool inverse) {
  fftw_plan pl = get_plan(n1, n2, inverse);
  auto* p = reinterpret_cast<fftw_complex*>(a.data());
  fftw_execute_dft(pl, p, p);
  if (inverse) {
    double s = 1.0 / (double(n1) * n2);
    for (auto& x : a) x *= s;
  }
}

}  // namespace hexwave
