// rng.cpp
#include "phase_bandit/rng.hpp"

#include "phase_bandit/errors.hpp"

namespace phase_bandit {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_key(std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = 0x6a09e667f3bcc908ULL;
  for (std::uint64_t k : keys) h = splitmix64(h ^ splitmix64(k));
  return h;
}

namespace {

std::uint64_t engine_seed(const RngState& s) {
  return splitmix64(splitmix64(s.seed) ^ (s.stream * 0xd1342543de82ef95ULL + 1));
}

}  // namespace

Rng::Rng(RngState state) : state_(state), engine_(engine_seed(state)) {}

double Rng::normal() { return normal_(engine_); }

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::uniform_index(std::uint64_t n) {
  if (n == 0) throw InvalidArgument("uniform_index needs n >= 1");
  std::uniform_int_distribution<std::uint64_t> dist(0, n - 1);
  return dist(engine_);
}

RngState Rng::child(std::uint64_t key) const {
  return RngState{state_.seed, stream_key({state_.stream, key})};
}

}  // namespace phase_bandit
