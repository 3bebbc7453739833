#include "htgd/rng.hpp"

namespace htgd {

std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = splitmix64(parent);
  for (std::uint64_t c : path) {
    s = splitmix64(s ^ splitmix64(c + 0x632BE59BD9B4E019ULL));
  }
  return s;
}

}  // namespace htgd
