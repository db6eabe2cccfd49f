#pragma once

// Reference implementations written as plain nested loops over
// std::vector<double>. Deliberately independent of the library's
// arithmetic; only the converters at the bottom touch library types.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "osmot/numerics.hpp"

namespace oracle {

struct T3 {
  int c = 0, h = 0, w = 0;
  std::vector<double> v;

  T3() = default;
  T3(int c_, int h_, int w_) : c(c_), h(h_), w(w_), v(std::size_t(c_) * h_ * w_, 0.0) {}
  double& at(int ci, int y, int x) { return v[(std::size_t(ci) * h + y) * w + x]; }
  double at(int ci, int y, int x) const { return v[(std::size_t(ci) * h + y) * w + x]; }
};

struct Mat {
  int r = 0, k = 0;
  std::vector<double> v;

  Mat() = default;
  Mat(int r_, int k_) : r(r_), k(k_), v(std::size_t(r_) * k_, 0.0) {}
  double& at(int i, int j) { return v[std::size_t(i) * k + j]; }
  double at(int i, int j) const { return v[std::size_t(i) * k + j]; }
};

struct Kern {
  int o = 0, i = 0, kh = 0, kw = 0;
  std::vector<double> w, b;

  double wt(int oo, int ii, int y, int x) const {
    return w[((std::size_t(oo) * i + ii) * kh + y) * kw + x];
  }
};

inline Mat matmul(const Mat& a, const Mat& b) {
  Mat out(a.r, b.k);
  for (int i = 0; i < a.r; ++i)
    for (int j = 0; j < b.k; ++j) {
      double s = 0;
      for (int t = 0; t < a.k; ++t) s += a.at(i, t) * b.at(t, j);
      out.at(i, j) = s;
    }
  return out;
}

inline Mat softmax_rows(const Mat& m) {
  Mat out(m.r, m.k);
  for (int i = 0; i < m.r; ++i) {
    double mx = m.at(i, 0);
    for (int j = 1; j < m.k; ++j) mx = std::max(mx, m.at(i, j));
    double z = 0;
    for (int j = 0; j < m.k; ++j) z += std::exp(m.at(i, j) - mx);
    for (int j = 0; j < m.k; ++j) out.at(i, j) = std::exp(m.at(i, j) - mx) / z;
  }
  return out;
}

inline T3 conv(const T3& t, const Kern& k, int pad, int stride = 1) {
  const int oh = (t.h + 2 * pad - k.kh) / stride + 1;
  const int ow = (t.w + 2 * pad - k.kw) / stride + 1;
  T3 out(k.o, oh, ow);
  for (int o = 0; o < k.o; ++o)
    for (int y = 0; y < oh; ++y)
      for (int x = 0; x < ow; ++x) {
        double s = k.b[o];
        for (int i = 0; i < k.i; ++i)
          for (int ky = 0; ky < k.kh; ++ky)
            for (int kx = 0; kx < k.kw; ++kx) {
              const int iy = y * stride + ky - pad;
              const int ix = x * stride + kx - pad;
              if (iy < 0 || ix < 0 || iy >= t.h || ix >= t.w) continue;
              s += k.wt(o, i, ky, kx) * t.at(i, iy, ix);
            }
        out.at(o, y, x) = s;
      }
  return out;
}

inline T3 adaptive_avg(const T3& t, int oh, int ow) {
  T3 out(t.c, oh, ow);
  for (int c = 0; c < t.c; ++c)
    for (int i = 0; i < oh; ++i)
      for (int j = 0; j < ow; ++j) {
        const int y0 = static_cast<int>(std::floor(double(i) * t.h / oh));
        const int y1 = static_cast<int>(std::ceil(double(i + 1) * t.h / oh));
        const int x0 = static_cast<int>(std::floor(double(j) * t.w / ow));
        const int x1 = static_cast<int>(std::ceil(double(j + 1) * t.w / ow));
        double s = 0;
        for (int y = y0; y < y1; ++y)
          for (int x = x0; x < x1; ++x) s += t.at(c, y, x);
        out.at(c, i, j) = s / ((y1 - y0) * (x1 - x0));
      }
  return out;
}

inline T3 upsample(const T3& t, int f) {
  T3 out(t.c, t.h * f, t.w * f);
  for (int c = 0; c < t.c; ++c)
    for (int y = 0; y < out.h; ++y)
      for (int x = 0; x < out.w; ++x) out.at(c, y, x) = t.at(c, y / f, x / f);
  return out;
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// C×H×W → C×N.
inline Mat flatten(const T3& t) {
  Mat m(t.c, t.h * t.w);
  for (int c = 0; c < t.c; ++c)
    for (int y = 0; y < t.h; ++y)
      for (int x = 0; x < t.w; ++x) m.at(c, y * t.w + x) = t.at(c, y, x);
  return m;
}

inline Mat transpose(const Mat& m) {
  Mat out(m.k, m.r);
  for (int i = 0; i < m.r; ++i)
    for (int j = 0; j < m.k; ++j) out.at(j, i) = m.at(i, j);
  return out;
}

inline Mat relation(const Mat& a, const Mat& b) { return softmax_rows(matmul(a, transpose(b))); }

inline Mat mix(const Mat& wt, const Mat& ws, double lambda) {
  Mat out(wt.r, wt.k);
  for (std::size_t n = 0; n < out.v.size(); ++n) {
    out.v[n] = lambda * wt.v[n] + (1 - lambda) * ws.v[n];
  }
  return out;
}

struct RenOut {
  T3 det, reid;
};

inline RenOut ren(const T3& f, const Kern& k1, const Kern& k2, const Kern& kf, double l1,
                  double l2, int ph, int pw) {
  const T3 pooled = adaptive_avg(f, ph, pw);
  const Mat m1 = flatten(conv(pooled, k1, 0));
  const Mat m2 = flatten(conv(pooled, k2, 0));
  const Mat w1 = mix(relation(m1, m1), relation(m1, m2), l1);
  const Mat w2 = mix(relation(m2, m2), relation(m2, m1), l2);
  const Mat g = flatten(conv(f, kf, 0));
  const Mat a1 = matmul(w1, g);
  const Mat a2 = matmul(w2, g);
  RenOut out{f, f};
  for (int c = 0; c < f.c; ++c)
    for (int y = 0; y < f.h; ++y)
      for (int x = 0; x < f.w; ++x) {
        out.det.at(c, y, x) += a1.at(c, y * f.w + x);
        out.reid.at(c, y, x) += a2.at(c, y * f.w + x);
      }
  return out;
}

inline T3 spatial_gate(const T3& f, const Kern& sam) {
  T3 pooled(2, f.h, f.w);
  for (int y = 0; y < f.h; ++y)
    for (int x = 0; x < f.w; ++x) {
      double s = 0, mx = f.at(0, y, x);
      for (int c = 0; c < f.c; ++c) {
        s += f.at(c, y, x);
        mx = std::max(mx, f.at(c, y, x));
      }
      pooled.at(0, y, x) = s / f.c;
      pooled.at(1, y, x) = mx;
    }
  const T3 a = conv(pooled, sam, sam.kh / 2);
  T3 out = f;
  for (int c = 0; c < f.c; ++c)
    for (int y = 0; y < f.h; ++y)
      for (int x = 0; x < f.w; ++x) out.at(c, y, x) += f.at(c, y, x) * sigmoid(a.at(0, y, x));
  return out;
}

struct Gate {
  std::vector<double> conv_w;  // width 3
  double conv_b = 0;
  std::vector<double> fc_w;
  double fc_b = 0;

  double shared(const std::vector<double>& v) const {
    const int n = static_cast<int>(v.size());
    double out = fc_b;
    for (int i = 0; i < n; ++i) {
      double h = conv_b;
      if (i - 1 >= 0) h += conv_w[0] * v[i - 1];
      h += conv_w[1] * v[i];
      if (i + 1 < n) h += conv_w[2] * v[i + 1];
      out += fc_w[i] * h;
    }
    return out;
  }
};

inline T3 channel_gate(const T3& f, const Gate& g) {
  std::vector<double> avg(f.c, 0.0), mx(f.c, 0.0);
  for (int c = 0; c < f.c; ++c) {
    mx[c] = f.at(c, 0, 0);
    for (int y = 0; y < f.h; ++y)
      for (int x = 0; x < f.w; ++x) {
        avg[c] += f.at(c, y, x);
        mx[c] = std::max(mx[c], f.at(c, y, x));
      }
    avg[c] /= f.h * f.w;
  }
  const double s = sigmoid(g.shared(avg) + g.shared(mx));
  T3 out = f;
  for (double& v : out.v) v += s * v;
  return out;
}

struct SaanWeights {
  Kern enc16, enc32, sam8, sam16, sam32, head;
  Gate cam;
};

inline T3 saan(const T3& f8, const T3& f16, const T3& f32, const SaanWeights& p) {
  const T3 b8 = spatial_gate(f8, p.sam8);
  const T3 b16 = spatial_gate(conv(upsample(f16, 2), p.enc16, 1), p.sam16);
  const T3 b32 = spatial_gate(conv(upsample(f32, 4), p.enc32, 1), p.sam32);
  T3 cat(b8.c + b16.c + b32.c, f8.h, f8.w);
  int off = 0;
  for (const T3* b : {&b8, &b16, &b32}) {
    for (int c = 0; c < b->c; ++c)
      for (int y = 0; y < b->h; ++y)
        for (int x = 0; x < b->w; ++x) cat.at(off + c, y, x) = b->at(c, y, x);
    off += b->c;
  }
  return conv(channel_gate(cat, p.cam), p.head, 1);
}

// Converters from library types (data movement only).

template <typename S>
T3 from(const osmot::Tensor3<S>& t) {
  T3 o(int(t.channels()), int(t.height()), int(t.width()));
  for (int c = 0; c < o.c; ++c)
    for (int y = 0; y < o.h; ++y)
      for (int x = 0; x < o.w; ++x) o.at(c, y, x) = double(t(c, y, x));
  return o;
}

template <typename S>
Mat from(const osmot::Matrix<S>& m) {
  Mat o(int(m.rows()), int(m.cols()));
  for (int i = 0; i < o.r; ++i)
    for (int j = 0; j < o.k; ++j) o.at(i, j) = double(m(i, j));
  return o;
}

template <typename S>
Kern from(const osmot::ConvKernel<S>& k) {
  Kern o{int(k.out_channels()), int(k.in_channels()), int(k.kernel_h()), int(k.kernel_w()),
         {}, {}};
  for (osmot::Index n = 0; n < k.weights().size(); ++n) o.w.push_back(double(k.weights()[n]));
  for (osmot::Index n = 0; n < k.biases().size(); ++n) o.b.push_back(double(k.biases()[n]));
  return o;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return INFINITY;
  double d = 0;
  for (std::size_t n = 0; n < a.size(); ++n) d = std::max(d, std::abs(a[n] - b[n]));
  return d;
}

}  // namespace oracle
