#pragma once
// d-dimensional periodic lattice (Z/L)^d with row-major flattening, last axis
// fastest. directed edges are indexed j in [0, 2d): axis j/2, sign +1 for even
// j and -1 for odd j. this direction order is shared by the sampler, the walk
// and the estimators.

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace msaw {

inline constexpr int kMaxDim = 4;

inline int edge_axis(int j) { return j / 2; }
inline int edge_sign(int j) { return (j % 2 == 0) ? +1 : -1; }

struct Torus {
  int d = 0;
  int L = 0;

  Torus() = default;
  Torus(int d_, int L_) : d(d_), L(L_) {
    if (d < 1 || d > kMaxDim) throw std::invalid_argument("torus: d out of range [1,4]");
    if (L < 2) throw std::invalid_argument("torus: L must be >= 2");
    vol_ = 1;
    for (int i = 0; i < d; ++i) vol_ *= L;
    if (vol_ > (int64_t(1) << 30)) throw std::invalid_argument("torus: volume too large");
    stride_[d - 1] = 1;
    for (int i = d - 2; i >= 0; --i) stride_[i] = stride_[i + 1] * L;
  }

  int64_t volume() const { return vol_; }
  int64_t stride(int axis) const { return stride_[axis]; }

  int mod(int a) const {
    int m = a % L;
    return m < 0 ? m + L : m;
  }

  int64_t index(const int* x) const {
    int64_t id = 0;
    for (int i = 0; i < d; ++i) id += int64_t(mod(x[i])) * stride_[i];
    return id;
  }

  void coords(int64_t idx, int* x) const {
    for (int i = 0; i < d; ++i) x[i] = int(idx / stride_[i]) % L;
  }

  int coord(int64_t idx, int axis) const { return int(idx / stride_[axis]) % L; }

  int64_t neighbor(int64_t idx, int axis, int dir) const {
    const int xi = coord(idx, axis);
    const int yi = mod(xi + dir);
    return idx + int64_t(yi - xi) * stride_[axis];
  }

  int64_t neighbor_edge(int64_t idx, int j) const {
    return neighbor(idx, edge_axis(j), edge_sign(j));
  }

  int64_t shifted(int64_t idx, const int* x) const {
    int64_t out = idx;
    for (int i = 0; i < d; ++i) {
      const int xi = coord(out, i);
      const int yi = mod(xi + x[i]);
      out += int64_t(yi - xi) * stride_[i];
    }
    return out;
  }

  // flat table nb[i*2d + j] = neighbor of site i along directed edge j
  std::vector<int32_t> neighbor_table() const {
    std::vector<int32_t> nb(size_t(vol_) * size_t(2 * d));
    for (int64_t i = 0; i < vol_; ++i)
      for (int j = 0; j < 2 * d; ++j) nb[size_t(i) * size_t(2 * d) + size_t(j)] = int32_t(neighbor_edge(i, j));
    return nb;
  }

  bool operator==(const Torus& o) const { return d == o.d && L == o.L; }

private:
  int64_t vol_ = 0;
  std::array<int64_t, kMaxDim> stride_{};
};

}  // namespace msaw
