#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

namespace urnmix {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// xoshiro256** seeded via splitmix64.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
  }

  std::uint64_t next() {
    auto rotl = [](std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); };
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // uniform integer in [0, bound), rejection sampling, bound >= 1
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (-bound) % bound;
    for (;;) {
      std::uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

  double uniform01() { return (next() >> 11) * 0x1.0p-53; }

  bool bernoulli_half() { return next() >> 63; }

 private:
  std::uint64_t s_[4];
};

// Per-trial seed, independent of execution schedule.
inline std::uint64_t trial_seed(std::uint64_t seed, long trial) {
  std::uint64_t st = seed ^ (0x9e3779b97f4a7c15ULL * (std::uint64_t(trial) + 1));
  splitmix64(st);
  return splitmix64(st);
}

// Runs `trials` independent trials split into fixed-size chunks and merges
// chunk accumulators in chunk order, so the result is identical for any
// worker count.
template <class Acc, class MakeAcc, class PerTrial, class Merge>
void run_trials_chunked(long trials, int threads, MakeAcc make_acc,
                        PerTrial per_trial, Merge merge,
                        long chunk_size = 1024) {
  if (trials <= 0) return;
  const long nchunks = (trials + chunk_size - 1) / chunk_size;
  std::vector<std::optional<Acc>> store(static_cast<std::size_t>(nchunks));
  std::atomic<long> next{0};

  auto worker = [&]() {
    for (;;) {
      long c = next.fetch_add(1);
      if (c >= nchunks) break;
      Acc acc = make_acc();
      const long lo = c * chunk_size;
      const long hi = std::min(trials, lo + chunk_size);
      for (long tr = lo; tr < hi; ++tr) per_trial(tr, acc);
      store[static_cast<std::size_t>(c)].emplace(std::move(acc));
    }
  };

  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (long c = 0; c < nchunks; ++c) merge(*store[static_cast<std::size_t>(c)]);
}

}  // namespace urnmix
