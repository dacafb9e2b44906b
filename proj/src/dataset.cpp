#include "distill/dataset.hpp"

#include <cmath>
#include <stdexcept>

namespace distill {

SyntheticDataset generate_dataset(std::size_t num_classes,
                                  std::size_t input_dim,
                                  std::size_t n_per_class, double spread,
                                  std::uint64_t seed) {
  if (num_classes < 2) throw std::invalid_argument("need K >= 2 classes");
  if (input_dim < 1) throw std::invalid_argument("need input_dim >= 1");
  if (n_per_class < 1) throw std::invalid_argument("need n_per_class >= 1");
  if (!(spread >= 0.0) || !std::isfinite(spread)) {
    throw std::invalid_argument("spread must be finite and >= 0");
  }

  SyntheticDataset ds;
  ds.num_classes = num_classes;
  ds.input_dim = input_dim;
  Rng rng(seed);

  const double radius = 3.0 * spread;
  for (std::size_t c = 0; c < num_classes; ++c) {
    Vec dir(input_dim);
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (double& v : dir) {
        v = rng.normal();
        norm2 += v * v;
      }
    } while (norm2 == 0.0);
    const double scale = radius / std::sqrt(norm2);
    for (double& v : dir) v *= scale;
    ds.class_means.push_back(std::move(dir));
  }

  ds.samples.reserve(num_classes * n_per_class);
  for (std::size_t c = 0; c < num_classes; ++c) {
    for (std::size_t i = 0; i < n_per_class; ++i) {
      Sample s;
      s.input = ds.class_means[c];
      for (double& v : s.input) v += spread * rng.normal();
      s.label.assign(num_classes, 0.0);
      s.label[c] = 1.0;
      ds.samples.push_back(std::move(s));
    }
  }
  return ds;
}

}  // namespace distill
