#include "osmot/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace osmot {

namespace {

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) {
  return m.allFinite();
}

std::string dims(Index c, Index h, Index w) {
  return std::to_string(c) + "x" + std::to_string(h) + "x" + std::to_string(w);
}

}  // namespace

template <typename Scalar>
Tensor3<Scalar>::Tensor3(Index channels, Index height, Index width)
    : height_(height), width_(width), data_(Flat::Zero(channels, height * width)) {
  if (channels < 0 || height < 0 || width < 0) {
    throw ShapeError("negative tensor dimension");
  }
}

template <typename Scalar>
Tensor3<Scalar>::Tensor3(Index height, Index width, Flat data)
    : height_(height), width_(width), data_(std::move(data)) {
  if (height < 0 || width < 0 || data_.cols() != height * width) {
    throw ShapeError("tensor data has " + std::to_string(data_.cols()) +
                     " columns, expected " + std::to_string(height * width));
  }
  if (!all_finite(data_)) {
    throw InvalidInputError("tensor contains non-finite values");
  }
}

template <typename Scalar>
Tensor3<Scalar> Tensor3<Scalar>::constant(Index channels, Index height, Index width,
                                          Scalar value) {
  return Tensor3(height, width, Flat::Constant(channels, height * width, value));
}

template <typename Scalar>
Tensor3<Scalar> Tensor3<Scalar>::from_values(Index channels, Index height, Index width,
                                             std::span<const Scalar> values) {
  if (static_cast<Index>(values.size()) != channels * height * width) {
    throw ShapeError("expected " + std::to_string(channels * height * width) +
                     " values for " + dims(channels, height, width) + ", got " +
                     std::to_string(values.size()));
  }
  Flat data(channels, height * width);
  std::copy(values.begin(), values.end(), data.data());
  return Tensor3(height, width, std::move(data));
}

template <typename Scalar>
ConvKernel<Scalar>::ConvKernel(Index out_channels, Index in_channels, Index kernel_h,
                               Index kernel_w, Vector<Scalar> weights, Vector<Scalar> bias)
    : out_(out_channels),
      in_(in_channels),
      kh_(kernel_h),
      kw_(kernel_w),
      weights_(std::move(weights)),
      bias_(std::move(bias)) {
  if (out_ <= 0 || in_ <= 0 || kh_ <= 0 || kw_ <= 0) {
    throw ShapeError("kernel dimensions must be positive");
  }
  if (weights_.size() != out_ * in_ * kh_ * kw_) {
    throw ShapeError("kernel weight count " + std::to_string(weights_.size()) +
                     " does not match " + std::to_string(out_) + "x" + std::to_string(in_) +
                     "x" + std::to_string(kh_) + "x" + std::to_string(kw_));
  }
  if (bias_.size() != out_) {
    throw ShapeError("kernel bias length must equal out_channels");
  }
  if (!weights_.allFinite() || !bias_.allFinite()) {
    throw InvalidInputError("kernel contains non-finite values");
  }
}

template <typename Scalar>
ConvKernel<Scalar> ConvKernel<Scalar>::zeros(Index out_channels, Index in_channels,
                                             Index kernel_h, Index kernel_w) {
  return ConvKernel(out_channels, in_channels, kernel_h, kernel_w,
                    Vector<Scalar>::Zero(out_channels * in_channels * kernel_h * kernel_w),
                    Vector<Scalar>::Zero(out_channels));
}

template <typename Scalar>
ConvKernel<Scalar> ConvKernel<Scalar>::identity(Index channels) {
  ConvKernel k = zeros(channels, channels, 1, 1);
  for (Index c = 0; c < channels; ++c) {
    k.weight(c, c, 0, 0) = Scalar(1);
  }
  return k;
}

template <typename Scalar>
Matrix<Scalar> ConvKernel<Scalar>::tap(Index ky, Index kx) const {
  Matrix<Scalar> w(out_, in_);
  for (Index o = 0; o < out_; ++o) {
    for (Index i = 0; i < in_; ++i) {
      w(o, i) = weight(o, i, ky, kx);
    }
  }
  return w;
}

template <typename Scalar>
Matrix<Scalar> softmax_rows(const Matrix<Scalar>& m) {
  if (!m.allFinite()) {
    throw InvalidInputError("softmax_rows: non-finite input");
  }
  Matrix<Scalar> out(m.rows(), m.cols());
  for (Index r = 0; r < m.rows(); ++r) {
    const Scalar row_max = m.row(r).maxCoeff();
    out.row(r) = (m.row(r).array() - row_max).exp().matrix();
    out.row(r) /= out.row(r).sum();
  }
  return out;
}

template <typename Scalar>
Matrix<Scalar> matmul(const Matrix<Scalar>& a, const Matrix<Scalar>& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                     " times " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
  return a * b;
}

template <typename Scalar>
Tensor3<Scalar> adaptive_avg_pool(const Tensor3<Scalar>& t, Index out_h, Index out_w) {
  if (out_h <= 0 || out_w <= 0) {
    throw InvalidInputError("adaptive_avg_pool: output dims must be positive");
  }
  if (out_h > t.height() || out_w > t.width()) {
    throw InvalidInputError("adaptive_avg_pool: output " + std::to_string(out_h) + "x" +
                            std::to_string(out_w) + " exceeds input " +
                            std::to_string(t.height()) + "x" + std::to_string(t.width()));
  }
  const Index h = t.height();
  const Index w = t.width();
  Tensor3<Scalar> out(t.channels(), out_h, out_w);
  for (Index c = 0; c < t.channels(); ++c) {
    const auto plane = t.channel(c);
    for (Index i = 0; i < out_h; ++i) {
      const Index y0 = (i * h) / out_h;
      const Index y1 = ((i + 1) * h + out_h - 1) / out_h;
      for (Index j = 0; j < out_w; ++j) {
        const Index x0 = (j * w) / out_w;
        const Index x1 = ((j + 1) * w + out_w - 1) / out_w;
        out(c, i, j) = plane.block(y0, x0, y1 - y0, x1 - x0).mean();
      }
    }
  }
  return out;
}

template <typename Scalar>
ChannelPool<Scalar> channel_pool(const Tensor3<Scalar>& t) {
  if (t.channels() < 1) {
    throw ShapeError("channel_pool: tensor has no channels");
  }
  using Flat = typename Tensor3<Scalar>::Flat;
  Flat avg = t.flat().colwise().mean();
  Flat max = t.flat().colwise().maxCoeff();
  return {Tensor3<Scalar>(t.height(), t.width(), std::move(avg)),
          Tensor3<Scalar>(t.height(), t.width(), std::move(max))};
}

template <typename Scalar>
GlobalPool<Scalar> global_pool(const Tensor3<Scalar>& t) {
  if (t.spatial_size() < 1) {
    throw ShapeError("global_pool: tensor has no spatial extent");
  }
  return {t.flat().rowwise().mean(), t.flat().rowwise().maxCoeff()};
}

template <typename Scalar>
Tensor3<Scalar> conv2d(const Tensor3<Scalar>& t, const ConvKernel<Scalar>& k, Index stride,
                       Index padding) {
  if (k.in_channels() != t.channels()) {
    throw ShapeError("conv2d: kernel expects " + std::to_string(k.in_channels()) +
                     " channels, tensor has " + std::to_string(t.channels()));
  }
  if (stride < 1 || padding < 0) {
    throw InvalidInputError("conv2d: stride must be >= 1 and padding >= 0");
  }
  if (t.height() + 2 * padding < k.kernel_h() || t.width() + 2 * padding < k.kernel_w()) {
    throw ShapeError("conv2d: kernel larger than padded input");
  }
  const Index out_h = (t.height() + 2 * padding - k.kernel_h()) / stride + 1;
  const Index out_w = (t.width() + 2 * padding - k.kernel_w()) / stride + 1;

  // Accumulate one gathered-input GEMM per kernel tap.
  Matrix<Scalar> acc = Matrix<Scalar>::Zero(k.out_channels(), out_h * out_w);
  Matrix<Scalar> gathered(t.channels(), out_h * out_w);
  for (Index ky = 0; ky < k.kernel_h(); ++ky) {
    for (Index kx = 0; kx < k.kernel_w(); ++kx) {
      gathered.setZero();
      for (Index oy = 0; oy < out_h; ++oy) {
        const Index iy = oy * stride + ky - padding;
        if (iy < 0 || iy >= t.height()) continue;
        for (Index ox = 0; ox < out_w; ++ox) {
          const Index ix = ox * stride + kx - padding;
          if (ix < 0 || ix >= t.width()) continue;
          gathered.col(oy * out_w + ox) = t.flat().col(iy * t.width() + ix);
        }
      }
      acc.noalias() += k.tap(ky, kx) * gathered;
    }
  }
  acc.colwise() += k.biases();
  return Tensor3<Scalar>(out_h, out_w, std::move(acc));
}

template <typename Scalar>
Tensor3<Scalar> upsample_nearest(const Tensor3<Scalar>& t, Index factor) {
  if (factor != 2 && factor != 4) {
    throw InvalidInputError("upsample: factor must be 2 or 4, got " + std::to_string(factor));
  }
  const Index out_h = t.height() * factor;
  const Index out_w = t.width() * factor;
  typename Tensor3<Scalar>::Flat data(t.channels(), out_h * out_w);
  for (Index y = 0; y < out_h; ++y) {
    for (Index x = 0; x < out_w; ++x) {
      data.col(y * out_w + x) = t.flat().col((y / factor) * t.width() + x / factor);
    }
  }
  return Tensor3<Scalar>(out_h, out_w, std::move(data));
}

template <typename Scalar>
Tensor3<Scalar> sigmoid(const Tensor3<Scalar>& t) {
  typename Tensor3<Scalar>::Flat data =
      t.flat().unaryExpr([](Scalar v) { return sigmoid<Scalar>(v); });
  return Tensor3<Scalar>(t.height(), t.width(), std::move(data));
}

template <typename Scalar>
Tensor3<Scalar> concat_channels(std::span<const Tensor3<Scalar>> parts) {
  if (parts.empty()) {
    throw ShapeError("concat_channels: nothing to concatenate");
  }
  Index total = 0;
  for (const auto& p : parts) {
    if (p.height() != parts.front().height() || p.width() != parts.front().width()) {
      throw ShapeError("concat_channels: spatial dims differ");
    }
    total += p.channels();
  }
  typename Tensor3<Scalar>::Flat data(total, parts.front().spatial_size());
  Index row = 0;
  for (const auto& p : parts) {
    data.middleRows(row, p.channels()) = p.flat();
    row += p.channels();
  }
  return Tensor3<Scalar>(parts.front().height(), parts.front().width(), std::move(data));
}

#define OSMOT_INSTANTIATE_NUMERICS(S)                                                    \
  template class Tensor3<S>;                                                             \
  template class ConvKernel<S>;                                                          \
  template Matrix<S> softmax_rows<S>(const Matrix<S>&);                                  \
  template Matrix<S> matmul<S>(const Matrix<S>&, const Matrix<S>&);                      \
  template Tensor3<S> adaptive_avg_pool<S>(const Tensor3<S>&, Index, Index);             \
  template ChannelPool<S> channel_pool<S>(const Tensor3<S>&);                            \
  template GlobalPool<S> global_pool<S>(const Tensor3<S>&);                              \
  template Tensor3<S> conv2d<S>(const Tensor3<S>&, const ConvKernel<S>&, Index, Index);  \
  template Tensor3<S> upsample_nearest<S>(const Tensor3<S>&, Index);                     \
  template Tensor3<S> sigmoid<S>(const Tensor3<S>&);                                     \
  template Tensor3<S> concat_channels<S>(std::span<const Tensor3<S>>);

OSMOT_INSTANTIATE_NUMERICS(double)
OSMOT_INSTANTIATE_NUMERICS(float)

#undef OSMOT_INSTANTIATE_NUMERICS

}  // namespace osmot
