#pragma once
#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace hexwave {

using cplx = std::complex<double>;

// worker count: HEXWAVE_THREADS if set, else hardware concurrency
int worker_count();
// runs f(i) for i in [0, n) on up to worker_count() threads; f must be safe to run concurrently
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f);

// in-place 2-D DFT of an n1 x n2 row-major array; forward is unnormalized,
// inverse carries the 1/(n1 n2) factor
void fft2(std::vector<cplx>& a, int n1, int n2, bool inverse);

inline long wrap(long x, long n) {
  long r = x % n;
  return r < 0 ? r + n : r;
}

}  // namespace hexwave
