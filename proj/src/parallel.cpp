#include "wavepack/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace wp {

namespace {
int g_threads = 1;
constexpr std::size_t kBlock = 1024;
}

void set_threads(int n) {
  if (n <= 0) n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  g_threads = n;
}

int threads() { return g_threads; }

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  const std::size_t nw = std::min<std::size_t>(static_cast<std::size_t>(g_threads), count);
  if (nw <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= count) break;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(nw - 1);
  for (std::size_t w = 1; w < nw; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
}

double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 16) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  std::size_t h = n / 2;
  return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

double ordered_sum(std::size_t count, const std::function<double(std::size_t)>& term) {
  const std::size_t nb = (count + kBlock - 1) / kBlock;
  std::vector<double> partial(nb, 0.0);
  parallel_for(nb, [&](std::size_t b) {
    std::size_t lo = b * kBlock, hi = std::min(count, lo + kBlock);
    std::vector<double> buf(hi - lo);
    for (std::size_t i = lo; i < hi; ++i) buf[i - lo] = term(i);
    partial[b] = pairwise_sum(buf.data(), buf.size());
  });
  return pairwise_sum(partial.data(), partial.size());
}

double ordered_max(std::size_t count, const std::function<double(std::size_t)>& term) {
  const std::size_t nb = (count + kBlock - 1) / kBlock;
  std::vector<double> partial(nb, 0.0);
  parallel_for(nb, [&](std::size_t b) {
    std::size_t lo = b * kBlock, hi = std::min(count, lo + kBlock);
    double m = 0.0;
    for (std::size_t i = lo; i < hi; ++i) m = std::max(m, term(i));
    partial[b] = m;
  });
  double m = 0.0;
  for (double p : partial) m = std::max(m, p);
  return m;
}

}  // namespace wp
