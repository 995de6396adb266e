#include "spcs/rng.hpp"

namespace spcs {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream) {
  return splitmix64(splitmix64(parent) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

}  // namespace spcs
