#ifndef AMBR_RNG_HPP
#define AMBR_RNG_HPP

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace ambr {

// Named substream of the run's master seed. Streams with different labels are
// independent; equal (seed, label) pairs reproduce the same draw sequence.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::string_view label);

  double uniform();                        // [0, 1)
  double uniform(double lo, double hi);    // [lo, hi)
  double exponential(double rate);         // throws on rate <= 0
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi);  // inclusive
  bool bernoulli(double p) { return uniform() < p; }

  const std::string& label() const { return label_; }

 private:
  std::string label_;
  std::mt19937_64 gen_;
};

}  // namespace ambr

#endif
