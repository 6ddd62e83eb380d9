#pragma once

// Reproducible Monte-Carlo estimation on the Heisenberg nilmanifold.
// Samples are split into fixed chunks; chunk k draws from its own
// mt19937_64 stream seeded by (seed, k), so the estimate does not depend on
// the number of worker threads. Chunk statistics are merged in chunk order.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <thread>
#include <vector>

#include "nilmix/errors.hpp"
#include "nilmix/nil/heisenberg.hpp"
#include "nilmix/nil/test_function.hpp"

namespace nilmix {

struct McEstimate {
  double estimate = 0;
  double std_error = 0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

struct McOptions {
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  std::uint64_t chunk = 1 << 16;
};

namespace detail {

inline double uniform01(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

inline std::mt19937_64 chunk_stream(std::uint64_t seed, std::uint64_t chunk) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32)};
  return std::mt19937_64(seq);
}

struct Moments {
  std::uint64_t n = 0;
  double mean = 0, m2 = 0;
  void push(double v) {
    ++n;
    double d = v - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (v - mean);
  }
  void merge(const Moments& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    double total = static_cast<double>(n + o.n);
    double d = o.mean - mean;
    mean += d * static_cast<double>(o.n) / total;
    m2 += o.m2 + d * d * static_cast<double>(n) * static_cast<double>(o.n) / total;
    n += o.n;
  }
};

}  // namespace detail

/// Mean of sample(rng) over opt.samples draws.
inline McEstimate mc_mean(const McOptions& opt, const std::function<double(std::mt19937_64&)>& sample) {
  if (opt.samples == 0 || opt.chunk == 0) throw InvalidInput("Monte-Carlo needs a positive sample count");
  const std::uint64_t chunks = (opt.samples + opt.chunk - 1) / opt.chunk;
  std::vector<detail::Moments> per(chunks);
  auto work = [&](std::uint64_t k) {
    auto g = detail::chunk_stream(opt.seed, k);
    std::uint64_t count = std::min(opt.chunk, opt.samples - k * opt.chunk);
    for (std::uint64_t i = 0; i < count; ++i) per[k].push(sample(g));
  };
  unsigned jobs = std::max(1u, std::min<unsigned>(opt.jobs, static_cast<unsigned>(chunks)));
  if (jobs == 1) {
    for (std::uint64_t k = 0; k < chunks; ++k) work(k);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t)
      pool.emplace_back([&, t] {
        for (std::uint64_t k = t; k < chunks; k += jobs) work(k);
      });
    for (auto& th : pool) th.join();
  }
  detail::Moments all;
  for (const auto& m : per) all.merge(m);
  McEstimate e;
  e.estimate = all.mean;
  e.samples = all.n;
  e.seed = opt.seed;
  e.std_error = all.n > 1 ? std::sqrt(std::max(0.0, all.m2 / static_cast<double>(all.n - 1)) / static_cast<double>(all.n)) : 0;
  return e;
}

inline HeisPointF uniform_point(std::mt19937_64& g) {
  long double x = detail::uniform01(g), y = detail::uniform01(g), z = detail::uniform01(g);
  return {x, y, z};
}

/// Estimate of int_X prod_i f_i(alpha(z_i) x) dmu(x).
inline McEstimate mc_correlation(const std::vector<TestFunction>& fs, const HeisAction& action,
                                 const std::vector<std::vector<long>>& zs, const McOptions& opt) {
  if (fs.size() != zs.size() || fs.empty()) throw InvalidInput("function and word lists must be nonempty and equal in length");
  if (opt.samples < 1000) throw InvalidInput("Monte-Carlo correlation needs at least 1000 samples");
  return mc_mean(opt, [&](std::mt19937_64& g) {
    HeisPointF x = uniform_point(g);
    double v = 1;
    for (size_t i = 0; i < fs.size(); ++i) {
      if (fs[i].is_constant()) {
        v *= fs[i].constant_term();
        continue;
      }
      HeisPointF p = action.apply_reduced(zs[i], x);
      v *= fs[i].eval_reduced(static_cast<double>(p.x), static_cast<double>(p.y), static_cast<double>(p.z));
    }
    return v;
  });
}

/// Estimate of int_X f(beta x) dmu(x).
inline McEstimate mc_pushforward_integral(const TestFunction& f, const HeisAuto& beta, const McOptions& opt) {
  return mc_mean(opt, [&](std::mt19937_64& g) { return f(beta.apply(uniform_point(g))); });
}

}  // namespace nilmix
