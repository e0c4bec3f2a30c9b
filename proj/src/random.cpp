#include "tsdia/random.hpp"

namespace tsdia {

std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RandomStream::RandomStream(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  engine_.seed(seq);
}

RandomStream RandomStream::for_realization(std::uint64_t master_seed, std::uint64_t index) {
  return RandomStream(mix_seed(mix_seed(master_seed) ^ mix_seed(index + 0x632be59bd9b4e019ULL)));
}

double RandomStream::uniform() {
  // 53 random bits, shifted off zero.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace tsdia
