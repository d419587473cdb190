#ifndef BAYESOT_RNG_HPP
#define BAYESOT_RNG_HPP

#include <array>
#include <cstdint>

namespace bayesot {

/// Philox4x32-10 block function. Counter-based: the output is a pure
/// function of (key, counter), so independent streams are just distinct
/// counter prefixes and no stream can perturb another.
std::array<std::uint32_t, 4> philox4x32(const std::array<std::uint32_t, 4>& counter,
                                        const std::array<std::uint32_t, 2>& key);

/// Stream identifiers. Chains and cost-model draws live in disjoint
/// counter subspaces of the same seed.
std::uint64_t chain_stream(std::uint64_t chain);
std::uint64_t cost_stream(int side, std::uint64_t atom, std::uint64_t sample);

/// One deterministic stream of a Philox-keyed generator. Copyable; a copy
/// continues independently from the same position.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  /// Uniform on [0, 1), 53-bit resolution.
  double next_double();

  /// Standard normal via the polar method (portable log, no libm).
  double next_normal();

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace bayesot

#endif
