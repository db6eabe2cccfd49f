#pragma once

#include "osmot/embedding.hpp"
#include "osmot/numerics.hpp"

namespace osmot {

/// Shared two-layer network of the channel gate: a width-3 convolution
/// (zero padding 1) along the channel-indexed vector, then a dense layer
/// down to one scalar.
template <typename Scalar>
struct ChannelGateParams {
  Vector<Scalar> conv_weights = Vector<Scalar>::Zero(3);
  Scalar conv_bias = 0;
  Vector<Scalar> fc_weights;  // one weight per channel
  Scalar fc_bias = 0;

  Scalar shared(const Vector<Scalar>& pooled) const;
};

template <typename Scalar>
struct SaanParams {
  ConvKernel<Scalar> encode_16;  // 3×3 after 2× upsampling
  ConvKernel<Scalar> encode_32;  // 3×3 after 4× upsampling
  ConvKernel<Scalar> sam_8;      // 7×7, 2→1
  ConvKernel<Scalar> sam_16;
  ConvKernel<Scalar> sam_32;
  ChannelGateParams<Scalar> cam;
  ConvKernel<Scalar> head;       // 3×3, concat channels → 512

  /// Channel count entering the channel gate and head.
  Index fused_channels(Index channels_8) const {
    return channels_8 + encode_16.out_channels() + encode_32.out_channels();
  }

  void validate(Index channels_8, Index channels_16, Index channels_32) const;
};

/// 512×H×W map at 1/8 input scale.
template <typename Scalar>
class EmbeddingMap {
 public:
  explicit EmbeddingMap(Tensor3<Scalar> e);

  const Tensor3<Scalar>& tensor() const { return e_; }
  Index height() const { return e_.height(); }
  Index width() const { return e_.width(); }

 private:
  Tensor3<Scalar> e_;
};

/// f + f ⊙ sigmoid(conv(concat(channel avg, channel max))), the gate
/// broadcast over channels.
template <typename Scalar>
Tensor3<Scalar> spatial_attention(const Tensor3<Scalar>& f, const ConvKernel<Scalar>& sam);

/// f + f · s with s = sigmoid(shared(global avg) + shared(global max)), a
/// single scalar gate.
template <typename Scalar>
Tensor3<Scalar> channel_attention(const Tensor3<Scalar>& f, const ChannelGateParams<Scalar>& cam);

/// Full aggregation: spatial gate per resolution (after upsample + encode
/// for the coarse maps), channel concat, channel gate, 3×3 head to 512.
template <typename Scalar>
EmbeddingMap<Scalar> saan_forward(const Tensor3<Scalar>& f8, const Tensor3<Scalar>& f16,
                                  const Tensor3<Scalar>& f32, const SaanParams<Scalar>& p);

/// L2-normalised 512-vector at column x, row y.
template <typename Scalar>
Embedding extract_embedding(const EmbeddingMap<Scalar>& e, Index x, Index y);

}  // namespace osmot
