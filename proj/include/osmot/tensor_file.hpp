#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "osmot/numerics.hpp"

namespace osmot {

/// In-memory form of a CSTN file:
///   "CSTN" | version u8 (=1) | rank u32le | rank × dim u32le | values f32le
/// Values are row-major over dims.
struct CstnTensor {
  std::vector<std::uint32_t> dims;
  std::vector<float> values;

  std::size_t rank() const { return dims.size(); }
  std::size_t element_count() const;

  bool operator==(const CstnTensor&) const = default;
};

inline constexpr std::uint8_t kCstnVersion = 1;

CstnTensor read_cstn(std::istream& in);
void write_cstn(std::ostream& out, const CstnTensor& t);

CstnTensor read_cstn_file(const std::filesystem::path& path);
void write_cstn_file(const std::filesystem::path& path, const CstnTensor& t);

// Conversions between CSTN payloads and the dense types. The to_* side
// checks rank and throws ShapeError; values widen losslessly to Scalar.

template <typename Scalar>
Tensor3<Scalar> to_tensor3(const CstnTensor& t) {
  if (t.rank() != 3) {
    throw ShapeError("expected a rank-3 tensor, got rank " + std::to_string(t.rank()));
  }
  Matrix<Scalar> data(t.dims[0], static_cast<Index>(t.dims[1]) * t.dims[2]);
  for (Index i = 0; i < data.size(); ++i) {
    data.data()[i] = static_cast<Scalar>(t.values[static_cast<std::size_t>(i)]);
  }
  return Tensor3<Scalar>(t.dims[1], t.dims[2], std::move(data));
}

template <typename Scalar>
Matrix<Scalar> to_matrix(const CstnTensor& t) {
  if (t.rank() != 2) {
    throw ShapeError("expected a rank-2 tensor, got rank " + std::to_string(t.rank()));
  }
  Matrix<Scalar> m(t.dims[0], t.dims[1]);
  for (Index i = 0; i < m.size(); ++i) {
    m.data()[i] = static_cast<Scalar>(t.values[static_cast<std::size_t>(i)]);
  }
  return m;
}

template <typename Scalar>
Vector<Scalar> to_vector(const CstnTensor& t) {
  if (t.rank() != 1) {
    throw ShapeError("expected a rank-1 tensor, got rank " + std::to_string(t.rank()));
  }
  Vector<Scalar> v(t.dims[0]);
  for (Index i = 0; i < v.size(); ++i) {
    v[i] = static_cast<Scalar>(t.values[static_cast<std::size_t>(i)]);
  }
  return v;
}

/// Weights are rank 4 (out, in, kh, kw); bias is rank 1 (out).
template <typename Scalar>
ConvKernel<Scalar> to_kernel(const CstnTensor& weights, const CstnTensor& bias) {
  if (weights.rank() != 4) {
    throw ShapeError("kernel weights must be rank 4, got rank " +
                     std::to_string(weights.rank()));
  }
  Vector<Scalar> w(static_cast<Index>(weights.values.size()));
  for (Index i = 0; i < w.size(); ++i) {
    w[i] = static_cast<Scalar>(weights.values[static_cast<std::size_t>(i)]);
  }
  return ConvKernel<Scalar>(weights.dims[0], weights.dims[1], weights.dims[2],
                            weights.dims[3], std::move(w), to_vector<Scalar>(bias));
}

template <typename Derived>
CstnTensor from_dense(const Eigen::DenseBase<Derived>& m, std::vector<std::uint32_t> dims) {
  CstnTensor t{std::move(dims), {}};
  if (t.element_count() != static_cast<std::size_t>(m.size())) {
    throw ShapeError("dims do not match element count");
  }
  t.values.reserve(t.element_count());
  // Row-major traversal regardless of the source storage order.
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      t.values.push_back(static_cast<float>(m(r, c)));
    }
  }
  return t;
}

template <typename Scalar>
CstnTensor from_tensor3(const Tensor3<Scalar>& t) {
  return from_dense(t.flat(), {static_cast<std::uint32_t>(t.channels()),
                               static_cast<std::uint32_t>(t.height()),
                               static_cast<std::uint32_t>(t.width())});
}

template <typename Scalar>
CstnTensor from_matrix(const Matrix<Scalar>& m) {
  return from_dense(m, {static_cast<std::uint32_t>(m.rows()),
                        static_cast<std::uint32_t>(m.cols())});
}

template <typename Scalar>
CstnTensor from_vector(const Vector<Scalar>& v) {
  return from_dense(v, {static_cast<std::uint32_t>(v.size())});
}

template <typename Scalar>
CstnTensor kernel_weights(const ConvKernel<Scalar>& k) {
  return from_dense(k.weights(), {static_cast<std::uint32_t>(k.out_channels()),
                                  static_cast<std::uint32_t>(k.in_channels()),
                                  static_cast<std::uint32_t>(k.kernel_h()),
                                  static_cast<std::uint32_t>(k.kernel_w())});
}

template <typename Scalar>
CstnTensor kernel_bias(const ConvKernel<Scalar>& k) {
  return from_vector(k.biases());
}

}  // namespace osmot
