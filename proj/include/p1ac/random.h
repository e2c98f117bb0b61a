#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include <Eigen/Core>

namespace p1ac {

using Rng = std::mt19937_64;

// Deterministic named sub-stream of a master seed.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream,
                          std::uint64_t index = 0);

inline Rng make_rng(std::uint64_t seed, std::string_view stream,
                    std::uint64_t index = 0) {
  return Rng(derive_seed(seed, stream, index));
}

double uniform(Rng& rng, double lo, double hi);
double gaussian(Rng& rng, double sigma);

Eigen::Vector3d random_unit_vector(Rng& rng);

// Haar-uniform rotation via a normalized Gaussian quaternion.
Eigen::Matrix3d random_rotation(Rng& rng);

}  // namespace p1ac
