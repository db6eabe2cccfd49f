#pragma once

#include <Eigen/Dense>

namespace osmot {

/// Width of the identity embeddings produced by the attention head.
inline constexpr Eigen::Index kEmbeddingDim = 512;

/// Unit-L2 appearance vector. The cosine similarity of two embeddings is
/// their dot product.
class Embedding {
 public:
  /// Normalises v; throws DegenerateError for a zero or non-finite vector.
  static Embedding normalized(const Eigen::VectorXd& v);

  /// Unit vector along axis k.
  static Embedding basis(Eigen::Index dim, Eigen::Index k);

  const Eigen::VectorXd& values() const { return v_; }
  Eigen::Index dim() const { return v_.size(); }
  double operator[](Eigen::Index i) const { return v_[i]; }

  double cosine(const Embedding& other) const { return v_.dot(other.v_); }

  bool operator==(const Embedding& other) const { return v_ == other.v_; }

 private:
  explicit Embedding(Eigen::VectorXd v) : v_(std::move(v)) {}

  Eigen::VectorXd v_;
};

}  // namespace osmot
