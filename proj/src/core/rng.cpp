#include "core/rng.hpp"

#include "core/dist.hpp"
#include "core/errors.hpp"

namespace panelselect {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  return splitmix64(splitmix64(z));
}

double NormalSampler::next_normal() {
  return std_normal_quantile(next_uniform());
}

DrawMatrix generate_draws(std::uint64_t seed, std::int64_t n, int r,
                          bool antithetic) {
  if (n < 1 || r < 1) {
    throw Error(ErrorCode::parameter, "generate_draws: need n >= 1 and R >= 1");
  }
  if (antithetic && r % 2 != 0) {
    throw Error(ErrorCode::parameter,
                "generate_draws: antithetic pairing needs an even R");
  }
  DrawMatrix dm;
  dm.n = n;
  dm.r = r;
  dm.seed = seed;
  dm.antithetic = antithetic;
  dm.values.resize(static_cast<std::size_t>(n) * r * 2);
  NormalSampler sampler(seed);
  std::size_t idx = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    for (int j = 0; j < r; ++j) {
      if (antithetic && j % 2 == 1) {
        dm.values[idx] = -dm.values[idx - 2];
        dm.values[idx + 1] = -dm.values[idx - 1];
      } else {
        dm.values[idx] = sampler.next_normal();
        dm.values[idx + 1] = sampler.next_normal();
      }
      idx += 2;
    }
  }
  return dm;
}

}  // namespace panelselect
