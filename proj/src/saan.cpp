#include "osmot/saan.hpp"

#include <array>
#include <string>

namespace osmot {

namespace {

template <typename Scalar>
void require_gate_kernel(const ConvKernel<Scalar>& k, const char* name) {
  if (k.in_channels() != 2 || k.out_channels() != 1 || k.kernel_h() % 2 == 0 ||
      k.kernel_w() % 2 == 0) {
    throw ShapeError(std::string("saan: ") + name +
                     " must map 2 channels to 1 with an odd kernel");
  }
}

template <typename Scalar>
void require_encoder(const ConvKernel<Scalar>& k, Index in_channels, const char* name) {
  if (k.in_channels() != in_channels || k.kernel_h() != 3 || k.kernel_w() != 3) {
    throw ShapeError(std::string("saan: ") + name + " must be 3x3 over " +
                     std::to_string(in_channels) + " channels");
  }
}

}  // namespace

template <typename Scalar>
Scalar ChannelGateParams<Scalar>::shared(const Vector<Scalar>& pooled) const {
  const Index n = pooled.size();
  if (conv_weights.size() != 3) {
    throw ShapeError("channel gate: 1-D kernel must have width 3");
  }
  if (fc_weights.size() != n) {
    throw ShapeError("channel gate: dense layer expects " + std::to_string(fc_weights.size()) +
                     " channels, got " + std::to_string(n));
  }
  Vector<Scalar> hidden(n);
  for (Index i = 0; i < n; ++i) {
    Scalar acc = conv_bias;
    for (Index t = 0; t < 3; ++t) {
      const Index j = i + t - 1;
      if (j >= 0 && j < n) acc += conv_weights[t] * pooled[j];
    }
    hidden[i] = acc;
  }
  return fc_weights.dot(hidden) + fc_bias;
}

template <typename Scalar>
void SaanParams<Scalar>::validate(Index channels_8, Index channels_16, Index channels_32) const {
  require_encoder(encode_16, channels_16, "encode_16");
  require_encoder(encode_32, channels_32, "encode_32");
  require_gate_kernel(sam_8, "sam_8");
  require_gate_kernel(sam_16, "sam_16");
  require_gate_kernel(sam_32, "sam_32");
  const Index fused = fused_channels(channels_8);
  if (cam.fc_weights.size() != fused) {
    throw ShapeError("saan: channel gate expects " + std::to_string(cam.fc_weights.size()) +
                     " channels, fused map has " + std::to_string(fused));
  }
  if (head.in_channels() != fused || head.out_channels() != kEmbeddingDim ||
      head.kernel_h() != 3 || head.kernel_w() != 3) {
    throw ShapeError("saan: head must be 3x3 mapping " + std::to_string(fused) + " to " +
                     std::to_string(kEmbeddingDim) + " channels");
  }
}

template <typename Scalar>
EmbeddingMap<Scalar>::EmbeddingMap(Tensor3<Scalar> e) : e_(std::move(e)) {
  if (e_.channels() != kEmbeddingDim) {
    throw ShapeError("embedding map must have " + std::to_string(kEmbeddingDim) +
                     " channels, got " + std::to_string(e_.channels()));
  }
}

template <typename Scalar>
Tensor3<Scalar> spatial_attention(const Tensor3<Scalar>& f, const ConvKernel<Scalar>& sam) {
  require_gate_kernel(sam, "spatial gate");
  const auto pooled = channel_pool(f);
  const std::array<Tensor3<Scalar>, 2> parts = {pooled.avg, pooled.max};
  const Tensor3<Scalar> stacked = concat_channels<Scalar>(parts);
  const Tensor3<Scalar> gate =
      sigmoid(conv2d(stacked, sam, 1, sam.kernel_h() / 2));
  if (gate.height() != f.height() || gate.width() != f.width()) {
    throw ShapeError("spatial gate kernel must be square");
  }
  Matrix<Scalar> out =
      f.flat() + (f.flat().array().rowwise() * gate.flat().row(0).array()).matrix();
  return Tensor3<Scalar>(f.height(), f.width(), std::move(out));
}

template <typename Scalar>
Tensor3<Scalar> channel_attention(const Tensor3<Scalar>& f,
                                  const ChannelGateParams<Scalar>& cam) {
  const auto pooled = global_pool(f);
  const Scalar gate = sigmoid(cam.shared(pooled.avg) + cam.shared(pooled.max));
  Matrix<Scalar> out = f.flat() + gate * f.flat();
  return Tensor3<Scalar>(f.height(), f.width(), std::move(out));
}

template <typename Scalar>
EmbeddingMap<Scalar> saan_forward(const Tensor3<Scalar>& f8, const Tensor3<Scalar>& f16,
                                  const Tensor3<Scalar>& f32, const SaanParams<Scalar>& p) {
  if (f16.height() * 2 != f8.height() || f16.width() * 2 != f8.width() ||
      f32.height() * 4 != f8.height() || f32.width() * 4 != f8.width()) {
    throw ShapeError("saan: 1/16 and 1/32 maps must be 1/2 and 1/4 the size of the 1/8 map");
  }
  p.validate(f8.channels(), f16.channels(), f32.channels());

  const std::array<Tensor3<Scalar>, 3> branches = {
      spatial_attention(f8, p.sam_8),
      spatial_attention(conv2d(upsample_nearest(f16, 2), p.encode_16, 1, 1), p.sam_16),
      spatial_attention(conv2d(upsample_nearest(f32, 4), p.encode_32, 1, 1), p.sam_32),
  };
  const Tensor3<Scalar> fused = channel_attention(concat_channels<Scalar>(branches), p.cam);
  return EmbeddingMap<Scalar>(conv2d(fused, p.head, 1, 1));
}

template <typename Scalar>
Embedding extract_embedding(const EmbeddingMap<Scalar>& e, Index x, Index y) {
  if (x < 0 || y < 0 || x >= e.width() || y >= e.height()) {
    throw IndexError("embedding location (" + std::to_string(x) + ", " + std::to_string(y) +
                     ") outside " + std::to_string(e.width()) + "x" +
                     std::to_string(e.height()) + " map");
  }
  const Eigen::VectorXd v =
      e.tensor().flat().col(y * e.width() + x).template cast<double>();
  return Embedding::normalized(v);
}

#define OSMOT_INSTANTIATE_SAAN(S)                                                        \
  template struct ChannelGateParams<S>;                                                  \
  template struct SaanParams<S>;                                                         \
  template class EmbeddingMap<S>;                                                        \
  template Tensor3<S> spatial_attention<S>(const Tensor3<S>&, const ConvKernel<S>&);     \
  template Tensor3<S> channel_attention<S>(const Tensor3<S>&, const ChannelGateParams<S>&); \
  template EmbeddingMap<S> saan_forward<S>(const Tensor3<S>&, const Tensor3<S>&,         \
                                           const Tensor3<S>&, const SaanParams<S>&);     \
  template Embedding extract_embedding<S>(const EmbeddingMap<S>&, Index, Index);

OSMOT_INSTANTIATE_SAAN(double)
OSMOT_INSTANTIATE_SAAN(float)

#undef OSMOT_INSTANTIATE_SAAN

}  // namespace osmot
