#pragma once

#include <cstdint>
#include <vector>

namespace fmds {

// Counter-style generator built on the splitmix64 mixer. Fully specified
// here so that sequences are identical across platforms and standard
// library implementations, which <random> distributions do not guarantee.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t x = (state_ += 0x9e3779b97f4a7c15ULL);
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Unbiased uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n);

  // Standard normal via Box-Muller; the second deviate of each pair is
  // cached so sequences stay deterministic per stream.
  double next_normal();

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

// Hierarchical seed derivation: (master_seed, stream path) -> independent
// generator. Identical paths yield identical sequences regardless of how
// work is split across threads.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t master_seed) : key_(mix(master_seed)) {}

  std::uint64_t master_key() const { return key_; }

  SeededRng derive(std::uint64_t word) const {
    SeededRng child(*this);
    child.key_ = mix(key_ ^ (word * 0x9e3779b97f4a7c15ULL + 0xd1b54a32d192ed03ULL));
    return child;
  }

  SeededRng derive(std::uint64_t a, std::uint64_t b) const { return derive(a).derive(b); }
  SeededRng derive(std::uint64_t a, std::uint64_t b, std::uint64_t c) const {
    return derive(a).derive(b).derive(c);
  }

  Rng stream(std::uint64_t word) const { return Rng(derive(word).key_); }
  Rng stream(std::uint64_t a, std::uint64_t b) const { return Rng(derive(a, b).key_); }

 private:
  static std::uint64_t mix(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  std::uint64_t key_;
};

}  // namespace fmds
