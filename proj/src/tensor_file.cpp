#include "osmot/tensor_file.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace osmot {

namespace {

constexpr std::array<char, 4> kMagic = {'C', 'S', 'T', 'N'};

std::uint32_t read_u32(std::istream& in) {
  std::array<unsigned char, 4> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), 4)) {
    throw InvalidInputError("CSTN: truncated header");
  }
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void write_u32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> b = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                                 static_cast<char>((v >> 16) & 0xff),
                                 static_cast<char>((v >> 24) & 0xff)};
  out.write(b.data(), 4);
}

}  // namespace

std::size_t CstnTensor::element_count() const {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

CstnTensor read_cstn(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), 4) || magic != kMagic) {
    throw InvalidInputError("CSTN: bad magic");
  }
  char version = 0;
  if (!in.get(version) || static_cast<std::uint8_t>(version) != kCstnVersion) {
    throw InvalidInputError("CSTN: unsupported version");
  }
  CstnTensor t;
  const std::uint32_t rank = read_u32(in);
  if (rank > 16) {
    throw InvalidInputError("CSTN: implausible rank " + std::to_string(rank));
  }
  t.dims.reserve(rank);
  for (std::uint32_t i = 0; i < rank; ++i) t.dims.push_back(read_u32(in));
  t.values.resize(t.element_count());
  for (float& v : t.values) {
    v = std::bit_cast<float>(read_u32(in));
    if (!std::isfinite(v)) {
      throw InvalidInputError("CSTN: non-finite value");
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw InvalidInputError("CSTN: trailing bytes after payload");
  }
  return t;
}

void write_cstn(std::ostream& out, const CstnTensor& t) {
  if (t.values.size() != t.element_count()) {
    throw ShapeError("CSTN: value count does not match dims");
  }
  out.write(kMagic.data(), 4);
  out.put(static_cast<char>(kCstnVersion));
  write_u32(out, static_cast<std::uint32_t>(t.dims.size()));
  for (auto d : t.dims) write_u32(out, d);
  for (float v : t.values) write_u32(out, std::bit_cast<std::uint32_t>(v));
}

CstnTensor read_cstn_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return read_cstn(in);
  } catch (const InvalidInputError& e) {
    throw InvalidInputError(path.string() + ": " + e.what());
  }
}

void write_cstn_file(const std::filesystem::path& path, const CstnTensor& t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_cstn(out, t);
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace osmot
