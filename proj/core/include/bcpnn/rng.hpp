#pragma once

#include <cstdint>
#include <vector>

namespace bcpnn {

// Counter-based random streams. Every draw is a pure function of
// (seed, stream, key...), so spike sampling stays bitwise reproducible
// under any partitioning of units or timesteps across workers.
namespace rng {

inline uint64_t mix(uint64_t x) {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t combine(uint64_t a, uint64_t b) { return mix(a ^ mix(b)); }

// Stream tags keep unrelated uses of the same seed decorrelated.
enum class Stream : uint64_t {
  spikes = 1,
  connectivity = 2,
  shuffle = 3,
  tasks = 4,
  probe = 5,
  test = 6,
  traces = 7,
};

inline uint64_t key(uint64_t seed, Stream s, uint64_t a = 0, uint64_t b = 0,
                    uint64_t c = 0) {
  uint64_t h = combine(seed, static_cast<uint64_t>(s));
  h = combine(h, a);
  h = combine(h, b);
  h = combine(h, c);
  return h;
}

// uniform in [0,1)
inline double uniform(uint64_t k) {
  return static_cast<double>(k >> 11) * 0x1.0p-53;
}

inline double uniform(uint64_t seed, Stream s, uint64_t a, uint64_t b = 0,
                      uint64_t c = 0) {
  return uniform(key(seed, s, a, b, c));
}

inline bool bernoulli(double p, uint64_t seed, Stream s, uint64_t a,
                      uint64_t b = 0, uint64_t c = 0) {
  return uniform(seed, s, a, b, c) < p;
}

// Sequential generator over a counter-based stream. Used where a stateful
// draw order is the natural idiom (shuffles, sampling without replacement).
class Sequence {
 public:
  explicit Sequence(uint64_t k) : key_(k) {}
  Sequence(uint64_t seed, Stream s, uint64_t a = 0, uint64_t b = 0)
      : key_(key(seed, s, a, b)) {}

  uint64_t next_u64() { return mix(key_ ^ counter_++); }
  double next_double() { return uniform(next_u64()); }

  // unbiased bounded draw (Lemire)
  uint64_t next_below(uint64_t n) {
    while (true) {
      uint64_t x = next_u64();
      __uint128_t m = static_cast<__uint128_t>(x) * n;
      uint64_t lo = static_cast<uint64_t>(m);
      if (lo >= n || lo >= (-n) % n) return static_cast<uint64_t>(m >> 64);
    }
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  uint64_t key_;
  uint64_t counter_ = 0;
};

}  // namespace rng
}  // namespace bcpnn
