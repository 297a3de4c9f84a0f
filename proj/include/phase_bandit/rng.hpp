// rng.hpp
#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace phase_bandit {

// (seed, stream) pair identifying one independent random stream. Two Rng
// objects built from equal states produce identical draw sequences.
struct RngState {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  friend bool operator==(const RngState&, const RngState&) = default;
};

std::uint64_t splitmix64(std::uint64_t x);

// Order-sensitive hash of a key tuple, used to name child streams such as
// (cell, seed index, purpose).
std::uint64_t stream_key(std::initializer_list<std::uint64_t> keys);

class Rng {
 public:
  explicit Rng(RngState state);

  double normal();
  double uniform();  // [0, 1)
  std::uint64_t uniform_index(std::uint64_t n);  // [0, n), n >= 1

  // Independent child stream; does not advance this generator.
  RngState child(std::uint64_t key) const;
  Rng split(std::uint64_t key) const { return Rng(child(key)); }

  const RngState& state() const { return state_; }

 private:
  RngState state_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace phase_bandit
