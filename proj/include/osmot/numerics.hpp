#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "osmot/errors.hpp"

namespace osmot {

using Index = Eigen::Index;

/// Row-major dense matrix; the storage order matches the (c, h, w) layout
/// of Tensor3 so reshaping C×H×W to C×N never copies.
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Dense C×H×W feature map. Internally a C×(H·W) row-major matrix, so
/// flat() is the C×N reshape used by the relation maps.
template <typename Scalar>
class Tensor3 {
 public:
  using Flat = Matrix<Scalar>;
  using ChannelView = Eigen::Map<const Matrix<Scalar>>;

  Tensor3() = default;

  /// Zero-filled tensor.
  Tensor3(Index channels, Index height, Index width);

  /// Adopts a C×(H·W) matrix; throws ShapeError on a size mismatch and
  /// InvalidInputError on non-finite values.
  Tensor3(Index height, Index width, Flat data);

  static Tensor3 constant(Index channels, Index height, Index width, Scalar value);
  static Tensor3 from_values(Index channels, Index height, Index width,
                             std::span<const Scalar> values);

  Index channels() const { return data_.rows(); }
  Index height() const { return height_; }
  Index width() const { return width_; }
  Index spatial_size() const { return height_ * width_; }
  Index size() const { return data_.size(); }

  Scalar operator()(Index c, Index y, Index x) const { return data_(c, y * width_ + x); }
  Scalar& operator()(Index c, Index y, Index x) { return data_(c, y * width_ + x); }

  const Flat& flat() const { return data_; }

  /// One channel viewed as an H×W matrix.
  ChannelView channel(Index c) const {
    return ChannelView(data_.row(c).data(), height_, width_);
  }

  bool same_shape(const Tensor3& other) const {
    return channels() == other.channels() && height_ == other.height_ &&
           width_ == other.width_;
  }

  template <typename To>
  Tensor3<To> cast() const {
    return Tensor3<To>(height_, width_, data_.template cast<To>());
  }

 private:
  Index height_ = 0;
  Index width_ = 0;
  Flat data_;
};

/// Convolution parameters, weights stored (out, in, kh, kw) row-major.
template <typename Scalar>
class ConvKernel {
 public:
  ConvKernel() = default;
  ConvKernel(Index out_channels, Index in_channels, Index kernel_h, Index kernel_w,
             Vector<Scalar> weights, Vector<Scalar> bias);

  static ConvKernel zeros(Index out_channels, Index in_channels, Index kernel_h,
                          Index kernel_w);
  /// 1×1 kernel acting as the identity on `channels` channels.
  static ConvKernel identity(Index channels);

  Index out_channels() const { return out_; }
  Index in_channels() const { return in_; }
  Index kernel_h() const { return kh_; }
  Index kernel_w() const { return kw_; }

  Scalar weight(Index o, Index i, Index ky, Index kx) const {
    return weights_[((o * in_ + i) * kh_ + ky) * kw_ + kx];
  }
  Scalar& weight(Index o, Index i, Index ky, Index kx) {
    return weights_[((o * in_ + i) * kh_ + ky) * kw_ + kx];
  }
  Scalar bias(Index o) const { return bias_[o]; }
  Scalar& bias(Index o) { return bias_[o]; }

  const Vector<Scalar>& weights() const { return weights_; }
  const Vector<Scalar>& biases() const { return bias_; }

  /// out×in weight slice for one kernel tap.
  Matrix<Scalar> tap(Index ky, Index kx) const;

 private:
  Index out_ = 0;
  Index in_ = 0;
  Index kh_ = 0;
  Index kw_ = 0;
  Vector<Scalar> weights_;
  Vector<Scalar> bias_;
};

template <typename Scalar>
struct ChannelPool {
  Tensor3<Scalar> avg;
  Tensor3<Scalar> max;
};

template <typename Scalar>
struct GlobalPool {
  Vector<Scalar> avg;
  Vector<Scalar> max;
};

/// Row-wise softmax stabilised by the row maximum.
template <typename Scalar>
Matrix<Scalar> softmax_rows(const Matrix<Scalar>& m);

template <typename Scalar>
Matrix<Scalar> matmul(const Matrix<Scalar>& a, const Matrix<Scalar>& b);

/// Mean over the windows [floor(iH/oh), ceil((i+1)H/oh)) × [..] per channel.
template <typename Scalar>
Tensor3<Scalar> adaptive_avg_pool(const Tensor3<Scalar>& t, Index out_h, Index out_w);

/// Per-location mean and max across channels (two 1×H×W maps).
template <typename Scalar>
ChannelPool<Scalar> channel_pool(const Tensor3<Scalar>& t);

/// Per-channel spatial mean and max.
template <typename Scalar>
GlobalPool<Scalar> global_pool(const Tensor3<Scalar>& t);

/// Zero-padded cross-correlation.
template <typename Scalar>
Tensor3<Scalar> conv2d(const Tensor3<Scalar>& t, const ConvKernel<Scalar>& k,
                       Index stride = 1, Index padding = 0);

/// Nearest-neighbour upsampling; factor must be 2 or 4.
template <typename Scalar>
Tensor3<Scalar> upsample_nearest(const Tensor3<Scalar>& t, Index factor);

template <typename Scalar>
Scalar sigmoid(Scalar x) {
  return Scalar(1) / (Scalar(1) + std::exp(-x));
}

template <typename Scalar>
Tensor3<Scalar> sigmoid(const Tensor3<Scalar>& t);

/// Stacks tensors with equal spatial dims along the channel axis.
template <typename Scalar>
Tensor3<Scalar> concat_channels(std::span<const Tensor3<Scalar>> parts);

/// Inverse of Tensor3::flat(): a C×(H·W) matrix back to C×H×W.
template <typename Scalar>
Tensor3<Scalar> reshape(const Matrix<Scalar>& flat, Index height, Index width) {
  return Tensor3<Scalar>(height, width, flat);
}

}  // namespace osmot
