#include "osmot/embedding.hpp"

#include <string>

#include "osmot/errors.hpp"

namespace osmot {

Embedding Embedding::normalized(const Eigen::VectorXd& v) {
  if (v.size() == 0 || !v.allFinite()) {
    throw DegenerateError("embedding is empty or non-finite");
  }
  const double norm = v.norm();
  if (norm == 0.0) {
    throw DegenerateError("embedding has zero norm");
  }
  return Embedding(v / norm);
}

Embedding Embedding::basis(Eigen::Index dim, Eigen::Index k) {
  if (k < 0 || k >= dim) {
    throw IndexError("basis axis " + std::to_string(k) + " outside dimension " +
                     std::to_string(dim));
  }
  return Embedding(Eigen::VectorXd::Unit(dim, k));
}

}  // namespace osmot
