#pragma once

// Synthetic Gaussian class-blob dataset used as the desk-scale stand-in
// for image benchmarks: class means seeded on a sphere, isotropic noise.

#include <cstdint>

#include "distill/network.hpp"

namespace distill {

struct SyntheticDataset {
  std::size_t num_classes = 0;
  std::size_t input_dim = 0;
  std::vector<Sample> samples;      // grouped by class, class-major order
  std::vector<Vec> class_means;
};

// Class means lie on a sphere of radius 3 * spread (directions seeded);
// each input is its class mean plus isotropic Gaussian noise of scale
// `spread`. Deterministic given the seed.
SyntheticDataset generate_dataset(std::size_t num_classes, std::size_t input_dim,
                                  std::size_t n_per_class, double spread,
                                  std::uint64_t seed);

}  // namespace distill
