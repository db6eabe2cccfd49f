#include "osmot/ren.hpp"

#include <cmath>
#include <string>

namespace osmot {

namespace {

template <typename Scalar>
constexpr Scalar row_sum_tolerance() {
  return std::is_same_v<Scalar, float> ? Scalar(1e-5) : Scalar(1e-9);
}

template <typename Scalar>
void require_pointwise_kernel(const ConvKernel<Scalar>& k, Index channels, const char* name) {
  if (k.kernel_h() != 1 || k.kernel_w() != 1 || k.in_channels() != channels ||
      k.out_channels() != channels) {
    throw ShapeError(std::string("ren: ") + name + " must be a 1x1 kernel mapping " +
                     std::to_string(channels) + " channels to itself");
  }
}

}  // namespace

template <typename Scalar>
RelationWeights<Scalar>::RelationWeights(Matrix<Scalar> w) : w_(std::move(w)) {
  if (w_.rows() != w_.cols()) {
    throw InvalidInputError("relation weights must be square");
  }
  if (!w_.allFinite() || (w_.array() < Scalar(0)).any() || (w_.array() > Scalar(1)).any()) {
    throw InvalidInputError("relation weights must lie in [0, 1]");
  }
  for (Index r = 0; r < w_.rows(); ++r) {
    if (std::abs(w_.row(r).sum() - Scalar(1)) > row_sum_tolerance<Scalar>()) {
      throw InvalidInputError("relation weight row " + std::to_string(r) +
                              " does not sum to 1");
    }
  }
}

template <typename Scalar>
void RenParams<Scalar>::validate(Index channels) const {
  require_pointwise_kernel(proj_t1, channels, "proj_t1");
  require_pointwise_kernel(proj_t2, channels, "proj_t2");
  require_pointwise_kernel(proj_feat, channels, "proj_feat");
  if (!(lambda_1 >= 0 && lambda_1 <= 1) || !(lambda_2 >= 0 && lambda_2 <= 1)) {
    throw InvalidParameterError("ren: lambdas must lie in [0, 1]");
  }
  if (pooled_h <= 0 || pooled_w <= 0) {
    throw InvalidParameterError("ren: pooled dims must be positive");
  }
}

template <typename Scalar>
TaskProjections<Scalar> pool_and_project(const Tensor3<Scalar>& f, const RenParams<Scalar>& p) {
  p.validate(f.channels());
  const Tensor3<Scalar> pooled = adaptive_avg_pool(f, p.pooled_h, p.pooled_w);
  return {conv2d(pooled, p.proj_t1).flat(), conv2d(pooled, p.proj_t2).flat()};
}

template <typename Scalar>
RelationWeights<Scalar> cross_relation(const Matrix<Scalar>& m_k, const Matrix<Scalar>& m_h) {
  if (m_k.rows() != m_h.rows() || m_k.cols() != m_h.cols()) {
    throw ShapeError("cross_relation: projections differ in shape");
  }
  const Matrix<Scalar> logits = matmul<Scalar>(m_k, m_h.transpose());
  return RelationWeights<Scalar>(softmax_rows(logits));
}

template <typename Scalar>
RelationWeights<Scalar> self_relation(const Matrix<Scalar>& m) {
  return cross_relation(m, m);
}

template <typename Scalar>
RelationWeights<Scalar> fuse_relations(const RelationWeights<Scalar>& w_t,
                                       const RelationWeights<Scalar>& w_s, Scalar lambda) {
  if (!(lambda >= 0 && lambda <= 1)) {
    throw InvalidParameterError("fuse_relations: lambda must lie in [0, 1]");
  }
  if (w_t.size() != w_s.size()) {
    throw ShapeError("fuse_relations: maps differ in size");
  }
  if (lambda == Scalar(1)) return w_t;
  if (lambda == Scalar(0)) return w_s;
  return RelationWeights<Scalar>(lambda * w_t.matrix() + (Scalar(1) - lambda) * w_s.matrix());
}

template <typename Scalar>
TaskFeatures<Scalar> ren_forward(const Tensor3<Scalar>& f, const RenParams<Scalar>& p) {
  const auto [m1, m2] = pool_and_project(f, p);
  const auto w1 = fuse_relations(self_relation(m1), cross_relation(m1, m2), p.lambda_1);
  const auto w2 = fuse_relations(self_relation(m2), cross_relation(m2, m1), p.lambda_2);

  const Matrix<Scalar> projected = conv2d(f, p.proj_feat).flat();
  Matrix<Scalar> det = f.flat() + matmul(w1.matrix(), projected);
  Matrix<Scalar> reid = f.flat() + matmul(w2.matrix(), projected);
  return {reshape(det, f.height(), f.width()), reshape(reid, f.height(), f.width())};
}

#define OSMOT_INSTANTIATE_REN(S)                                                          \
  template class RelationWeights<S>;                                                      \
  template struct RenParams<S>;                                                           \
  template TaskProjections<S> pool_and_project<S>(const Tensor3<S>&, const RenParams<S>&); \
  template RelationWeights<S> self_relation<S>(const Matrix<S>&);                         \
  template RelationWeights<S> cross_relation<S>(const Matrix<S>&, const Matrix<S>&);      \
  template RelationWeights<S> fuse_relations<S>(const RelationWeights<S>&,                \
                                                const RelationWeights<S>&, S);            \
  template TaskFeatures<S> ren_forward<S>(const Tensor3<S>&, const RenParams<S>&);

OSMOT_INSTANTIATE_REN(double)
OSMOT_INSTANTIATE_REN(float)

#undef OSMOT_INSTANTIATE_REN

}  // namespace osmot
