#include "qboot/rng.hpp"

#include "qboot/dist_models.hpp"

namespace qboot {

namespace {

// One large odd constant per nesting level.
constexpr std::uint64_t kStreamConstants[] = {
    0x9e3779b97f4a7c15ULL,  // Replicate
    0xbf58476d1ce4e5b9ULL,  // Resample
    0x94d049bb133111ebULL,  // Proxy
    0xd6e8feb86659fd93ULL,  // LimitLaw
    0xa0761d6478bd642fULL,  // Oracle
    0xe7037ed1a0b428dbULL,  // Grid
    0x8ebc6af09c88c6e3ULL,  // Stream
};

}  // namespace

std::uint64_t seed_for(std::uint64_t parent_seed, std::uint64_t index, SeedStream stream) {
  // 1-based multiplier: index 0 must not alias the parent seed itself.
  return parent_seed ^ ((index + 1) * kStreamConstants[static_cast<unsigned>(stream)]);
}

double Rng::normal() { return std_normal_quantile(uniform01()); }

}  // namespace qboot
