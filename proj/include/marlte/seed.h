#ifndef MARLTE_SEED_H_
#define MARLTE_SEED_H_

#include <cstdint>
#include <initializer_list>

namespace marlte {

// splitmix64 finalizer.
inline uint64_t Mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives an independent stream seed from a base seed and a path of indices,
// e.g. DeriveSeed(seed, {kTrainTmStream, tm_id}).
inline uint64_t DeriveSeed(uint64_t base, std::initializer_list<uint64_t> path) {
  uint64_t s = Mix64(base);
  for (uint64_t p : path) s = Mix64(s ^ Mix64(p + 0x632be59bd9b4e019ULL));
  return s;
}

// 64-bit FNV-1a, used for config and checkpoint fingerprints.
inline uint64_t Fnv1a(const void* data, std::size_t size,
                      uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace marlte

#endif  // MARLTE_SEED_H_
