#pragma once

#include "osmot/numerics.hpp"

namespace osmot {

/// Row-stochastic C×C channel affinity map.
template <typename Scalar>
class RelationWeights {
 public:
  /// Throws InvalidInputError unless w is square with entries in [0, 1]
  /// and every row summing to 1.
  explicit RelationWeights(Matrix<Scalar> w);

  const Matrix<Scalar>& matrix() const { return w_; }
  Index size() const { return w_.rows(); }
  Scalar operator()(Index i, Index j) const { return w_(i, j); }

 private:
  Matrix<Scalar> w_;
};

/// Mixing weights between self- and cross-relation maps, one per task.
struct LambdaPair {
  double det = 0.5;
  double reid = 0.5;
};

/// Training-time initialisation.
inline constexpr LambdaPair kInitialLambdas{0.5, 0.5};
/// Values the mixing weights settle at after training.
inline constexpr LambdaPair kConvergedLambdas{0.12122, 0.31519};

template <typename Scalar>
struct RenParams {
  ConvKernel<Scalar> proj_t1;    // 1×1, C→C, yields M1 (detection)
  ConvKernel<Scalar> proj_t2;    // 1×1, C→C, yields M2 (re-identification)
  ConvKernel<Scalar> proj_feat;  // 1×1, C→C, shared by both tasks
  Scalar lambda_1 = Scalar(0.5);
  Scalar lambda_2 = Scalar(0.5);
  Index pooled_h = 6;
  Index pooled_w = 10;

  void set_lambdas(LambdaPair l) {
    lambda_1 = static_cast<Scalar>(l.det);
    lambda_2 = static_cast<Scalar>(l.reid);
  }

  /// Throws ShapeError / InvalidParameterError for inconsistent params.
  void validate(Index channels) const;
};

template <typename Scalar>
struct TaskProjections {
  Matrix<Scalar> m1;  // C×N'
  Matrix<Scalar> m2;  // C×N'
};

template <typename Scalar>
struct TaskFeatures {
  Tensor3<Scalar> det;
  Tensor3<Scalar> reid;
};

/// Average-pools f to pooled_h×pooled_w, applies the two 1×1 task
/// projections and flattens each to C×N'.
template <typename Scalar>
TaskProjections<Scalar> pool_and_project(const Tensor3<Scalar>& f, const RenParams<Scalar>& p);

/// W[i][j] = softmax_j(m_i · m_j).
template <typename Scalar>
RelationWeights<Scalar> self_relation(const Matrix<Scalar>& m);

/// W[i][j] = softmax_j(m_k_i · m_h_j).
template <typename Scalar>
RelationWeights<Scalar> cross_relation(const Matrix<Scalar>& m_k, const Matrix<Scalar>& m_h);

/// lambda·W_T + (1 − lambda)·W_S; lambda must lie in [0, 1].
template <typename Scalar>
RelationWeights<Scalar> fuse_relations(const RelationWeights<Scalar>& w_t,
                                       const RelationWeights<Scalar>& w_s, Scalar lambda);

/// Task-dependent features: F_k = f + reshape(W_k · flat(proj_feat(f))).
template <typename Scalar>
TaskFeatures<Scalar> ren_forward(const Tensor3<Scalar>& f, const RenParams<Scalar>& p);

}  // namespace osmot
