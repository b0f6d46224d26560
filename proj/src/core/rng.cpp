#include "taxaug/rng.hpp"

#include "taxaug/error.hpp"

namespace taxaug {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::parse: return "parse error";
    case ErrorCode::duplicate: return "duplication error";
    case ErrorCode::unusable_dataset: return "unusable dataset";
    case ErrorCode::stratification: return "stratification error";
    case ErrorCode::range: return "range error";
    case ErrorCode::geometry: return "geometry error";
    case ErrorCode::format: return "format error";
    case ErrorCode::data: return "data error";
    case ErrorCode::shape: return "shape error";
    case ErrorCode::degenerate: return "degenerate data";
    case ErrorCode::neighborhood: return "neighborhood error";
    case ErrorCode::cannot_oversample: return "cannot oversample";
    case ErrorCode::numeric: return "numeric error";
    case ErrorCode::missing_class: return "missing class";
    case ErrorCode::config: return "configuration error";
    case ErrorCode::io: return "i/o error";
  }
  return "error";
}

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {
inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}
}  // namespace

Rng::Rng(std::uint64_t seed) {
  SplitMix64 sm(seed);
  for (auto& word : s_) word = sm.next();
}

std::uint64_t Rng::next() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform01() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n <= 1) return 0;
  // 2^64 mod n, computed without 128-bit arithmetic.
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    std::uint64_t x = next();
    if (x >= threshold) return x % n;
  }
}

std::uint64_t derive_seed(std::uint64_t base,
                          std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = SplitMix64(base).next();
  for (std::uint64_t p : parts) h = SplitMix64(h ^ (p + 0x632be59bd9b4e019ULL)).next();
  return h;
}

}  // namespace taxaug
