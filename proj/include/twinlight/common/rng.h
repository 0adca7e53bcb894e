#ifndef TWINLIGHT_COMMON_RNG_H_
#define TWINLIGHT_COMMON_RNG_H_

#include <cstdint>

namespace twinlight {

// SplitMix64 finalizer.
constexpr uint64_t Mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based generator: the stream is a pure function of
// (seed, domain, index), so any pixel/sample can be regenerated in isolation
// and results never depend on evaluation order.
class CounterRng {
 public:
  CounterRng(uint64_t seed, uint64_t domain, uint64_t index)
      : key_(Mix64(Mix64(Mix64(seed) ^ domain) ^ index)) {}

  uint64_t NextU64() { return Mix64(key_ ^ (counter_++ * 0xd1b54a32d192ed03ULL)); }

  // Uniform in [0, 1).
  double Uniform() { return static_cast<double>(NextU64() >> 11) * 0x1.0p-53; }

 private:
  uint64_t key_;
  uint64_t counter_ = 0;
};

// Stream domains; one per randomized stage so streams never alias.
enum RngDomain : uint64_t {
  kDomainAmbientOcclusion = 1,
  kDomainShading = 2,
  kDomainFreeSpace = 3,
  kDomainAugment = 4,
  kDomainTest = 99,
};

}  // namespace twinlight

#endif  // TWINLIGHT_COMMON_RNG_H_
