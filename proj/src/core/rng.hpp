#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace hesselm {

// Deterministic random source. Doubles are derived from the raw mt19937_64
// stream instead of std::uniform_real_distribution, whose output is
// implementation-defined; identical seeds give identical streams everywhere.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // uniform on [0, 1)
  double next_unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // uniform on [-1, 1)
  double next_symmetric() { return 2.0 * next_unit() - 1.0; }

  // uniform integer in [0, bound)
  std::uint64_t next_below(std::uint64_t bound) { return gen_() % bound; }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[next_below(i)]);
    }
  }

private:
  std::mt19937_64 gen_;
};

}  // namespace hesselm
