#include "ambr/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ambr {

namespace {
std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}
}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::string_view label)
    : label_(label) {
  std::uint64_t lh = fnv1a(label);
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                    static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(lh),
                    static_cast<std::uint32_t>(lh >> 32)};
  gen_.seed(seq);
}

double RngStream::uniform() {
  // 53-bit mantissa; avoids distribution-object state for reproducibility.
  return (gen_() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

double RngStream::exponential(double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("exponential: rate must be > 0");
  double u;
  do {
    u = uniform();
  } while (u == 0.0);
  return -std::log(u) / rate;
}

std::uint64_t RngStream::uniform_int(std::uint64_t lo, std::uint64_t hi) {
  std::uint64_t span = hi - lo + 1;
  // Rejection sampling keeps the draw unbiased.
  std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() / span * span;
  std::uint64_t x;
  do {
    x = gen_();
  } while (x >= limit);
  return lo + x % span;
}

}  // namespace ambr
