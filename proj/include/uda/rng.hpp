#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace uda {

// Counter-style deterministic generator. A stream is addressed by
// (master_seed, purpose_tag); equal addresses replay the same sequence and
// distinct tags give statistically independent streams, so draw order in one
// stream never perturbs another.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::string_view purpose_tag)
      : state_(derive_seed(master_seed, purpose_tag)) {}

  static std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view purpose_tag);

  std::uint64_t next_u64();

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; the paired draw is cached.
  double normal();

  // Unbiased uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[static_cast<std::size_t>(below(i))]);
    }
  }

 private:
  std::uint64_t state_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace uda
