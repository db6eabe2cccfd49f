#pragma once

#include <filesystem>

#include "osmot/numerics.hpp"
#include "osmot/prng.hpp"

namespace testutil {

inline std::filesystem::path fixture_dir() { return OSMOT_FIXTURE_DIR; }

inline osmot::Tensor3<double> random_tensor(osmot::SplitMix64& rng, osmot::Index c,
                                            osmot::Index h, osmot::Index w,
                                            double scale = 1.0) {
  osmot::Tensor3<double> t(c, h, w);
  for (osmot::Index i = 0; i < c; ++i)
    for (osmot::Index y = 0; y < h; ++y)
      for (osmot::Index x = 0; x < w; ++x) t(i, y, x) = rng.uniform(-scale, scale);
  return t;
}

inline osmot::Matrix<double> random_matrix(osmot::SplitMix64& rng, osmot::Index r,
                                           osmot::Index k, double scale = 1.0) {
  osmot::Matrix<double> m(r, k);
  for (osmot::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-scale, scale);
  return m;
}

inline osmot::ConvKernel<double> random_kernel(osmot::SplitMix64& rng, osmot::Index out,
                                               osmot::Index in, osmot::Index kh,
                                               osmot::Index kw, double scale = 0.5) {
  osmot::Vector<double> w(out * in * kh * kw), b(out);
  for (osmot::Index i = 0; i < w.size(); ++i) w[i] = rng.uniform(-scale, scale);
  for (osmot::Index i = 0; i < b.size(); ++i) b[i] = rng.uniform(-scale, scale);
  return {out, in, kh, kw, std::move(w), std::move(b)};
}

}  // namespace testutil
