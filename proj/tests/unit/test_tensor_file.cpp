#include <gtest/gtest.h>

#include <sstream>

#include "helpers.hpp"
#include "osmot/tensor_file.hpp"

using namespace osmot;

namespace {

std::string encode(const CstnTensor& t) {
  std::ostringstream out;
  write_cstn(out, t);
  return out.str();
}

CstnTensor decode(const std::string& bytes) {
  std::istringstream in(bytes);
  return read_cstn(in);
}

}  // namespace

TEST(Cstn, ByteLayout) {
  const CstnTensor t{{2}, {1.0f, -2.0f}};
  const std::string b = encode(t);
  const std::string want("CSTN\x01\x01\x00\x00\x00\x02\x00\x00\x00"
                         "\x00\x00\x80\x3f\x00\x00\x00\xc0",
                         21);
  EXPECT_EQ(b, want);
  EXPECT_EQ(decode(b), t);
}

TEST(Cstn, RoundTripRandom) {
  SplitMix64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    CstnTensor t;
    const std::size_t rank = rng.below(5);
    for (std::size_t i = 0; i < rank; ++i) t.dims.push_back(std::uint32_t(1 + rng.below(5)));
    for (std::size_t i = 0; i < t.element_count(); ++i) {
      t.values.push_back(static_cast<float>(rng.uniform(-1e3, 1e3)));
    }
    EXPECT_EQ(decode(encode(t)), t);
  }
}

TEST(Cstn, RejectsMalformed) {
  std::string b = encode({{1}, {1.0f}});
  EXPECT_THROW(decode("XSTN" + b.substr(4)), InvalidInputError);
  std::string v2 = b;
  v2[4] = 2;
  EXPECT_THROW(decode(v2), InvalidInputError);
  EXPECT_THROW(decode(b.substr(0, b.size() - 1)), InvalidInputError);
  EXPECT_THROW(decode(b + "x"), InvalidInputError);
  std::string nan = b;
  nan[b.size() - 1] = '\x7f';
  nan[b.size() - 2] = '\xc0';
  EXPECT_THROW(decode(nan), InvalidInputError);
  EXPECT_THROW(encode({{2}, {1.0f}}), ShapeError);
}

TEST(Cstn, MissingFileIsIoError) {
  EXPECT_THROW(read_cstn_file("/nonexistent/x.cstn"), IoError);
}

TEST(Cstn, DenseConversions) {
  SplitMix64 rng(4);
  const auto t = testutil::random_tensor(rng, 2, 3, 4);
  const auto back = to_tensor3<double>(from_tensor3(t));
  EXPECT_LT((back.flat() - t.flat()).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_THROW(to_matrix<double>(from_tensor3(t)), ShapeError);

  const auto k = testutil::random_kernel(rng, 3, 2, 3, 3);
  const auto k2 = to_kernel<double>(kernel_weights(k), kernel_bias(k));
  EXPECT_EQ(k2.kernel_h(), 3);
  EXPECT_NEAR(k2.weight(2, 1, 0, 2), k.weight(2, 1, 0, 2), 1e-7);
}
