#ifndef PANELSELECT_CORE_RNG_HPP
#define PANELSELECT_CORE_RNG_HPP

#include <cstdint>
#include <random>
#include <vector>

namespace panelselect {

// Derives a decorrelated substream seed from (seed, stream), splitmix64-style.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// Reproducible normal sampler: mt19937_64 (standardized engine, identical
// output on every platform), uniforms mapped from the top 53 bits offset to
// the cell midpoint, normals by inverse CDF (AS 241). std::normal_distribution
// is never used because its output is implementation-defined.
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : engine_(seed) {}

  double next_uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double next_normal();

 private:
  std::mt19937_64 engine_;
};

// n x R x 2 standard normal draws, person-major. Fully determined by
// (seed, n, R, antithetic); with antithetic on, draw 2j+1 is the negation of
// draw 2j, so the draw set is closed under sign flips.
struct DrawMatrix {
  std::int64_t n = 0;
  int r = 0;
  std::uint64_t seed = 0;
  bool antithetic = false;
  std::vector<double> values;  // size n*r*2, layout [person][draw][component]

  double eta1(std::int64_t person, int draw) const {
    return values[2 * (person * r + draw)];
  }
  double eta2(std::int64_t person, int draw) const {
    return values[2 * (person * r + draw) + 1];
  }
};

DrawMatrix generate_draws(std::uint64_t seed, std::int64_t n, int r,
                          bool antithetic = false);

}  // namespace panelselect

#endif
