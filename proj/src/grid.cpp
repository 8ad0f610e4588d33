#include "stabkit/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stabkit {

BoxGrid::BoxGrid(int dim, double radius, int points_per_axis)
    : dim_(dim), radius_(radius), per_axis_(points_per_axis) {
  if (dim < 1) throw std::invalid_argument("grid dimension must be >= 1");
  if (radius <= 0) throw std::invalid_argument("grid radius must be positive");
  if (points_per_axis < 3 || points_per_axis % 2 == 0)
    throw std::invalid_argument("grid must be odd and >= 3 points per axis");
  const int c = center();
  spacing_ = radius / c;
  coords_.resize(per_axis_);
  for (int i = 0; i < per_axis_; ++i) coords_[i] = (i - c) * spacing_;

  size_ = 1;
  for (int d = 0; d < dim_; ++d) {
    if (size_ > 2'000'000 / per_axis_) throw std::invalid_argument("grid too large");
    size_ *= per_axis_;
  }

  order_.resize(size_);
  for (int i = 0; i < size_; ++i) order_[i] = i;
  std::vector<int> shells(size_);
  for (int i = 0; i < size_; ++i) shells[i] = shell(i);
  std::sort(order_.begin(), order_.end(), [&shells](int a, int b) {
    if (shells[a] != shells[b]) return shells[a] < shells[b];
    return a < b;
  });
}

std::vector<int> BoxGrid::multi(int lex) const {
  std::vector<int> m(dim_);
  for (int d = dim_ - 1; d >= 0; --d) {
    m[d] = lex % per_axis_;
    lex /= per_axis_;
  }
  return m;
}

int BoxGrid::lex(const std::vector<int>& multi) const {
  int idx = 0;
  for (int d = 0; d < dim_; ++d) idx = idx * per_axis_ + multi[d];
  return idx;
}

Vector BoxGrid::point(int lex_index) const {
  std::vector<int> m = multi(lex_index);
  Vector p(dim_);
  for (int d = 0; d < dim_; ++d) p[d] = coords_[m[d]];
  return p;
}

int BoxGrid::shell(int lex_index) const {
  std::vector<int> m = multi(lex_index);
  const int c = center();
  int s = 0;
  for (int d = 0; d < dim_; ++d) s = std::max(s, std::abs(m[d] - c));
  return s;
}

int BoxGrid::inward_neighbor(int lex_index) const {
  std::vector<int> m = multi(lex_index);
  const int c = center();
  int s = 0;
  for (int d = 0; d < dim_; ++d) s = std::max(s, std::abs(m[d] - c));
  if (s == 0) return lex_index;
  for (int d = 0; d < dim_; ++d) {
    if (m[d] - c == s) --m[d];
    else if (m[d] - c == -s) ++m[d];
  }
  return lex(m);
}

Vector BoxGrid::interpolate(const std::vector<Vector>& values, const Vector& y) const {
  std::vector<int> cell(dim_);
  std::vector<double> frac(dim_);
  for (int d = 0; d < dim_; ++d) {
    double t = (y[d] + radius_) / spacing_;
    int a = static_cast<int>(std::floor(t));
    a = std::clamp(a, 0, per_axis_ - 2);
    cell[d] = a;
    frac[d] = t - a;
  }
  const int corners = 1 << dim_;
  Vector out = Vector::Zero(values[0].size());
  std::vector<int> m(dim_);
  for (int corner = 0; corner < corners; ++corner) {
    double weight = 1.0;
    for (int d = 0; d < dim_; ++d) {
      bool hi = (corner >> d) & 1;
      m[d] = cell[d] + (hi ? 1 : 0);
      weight *= hi ? frac[d] : (1.0 - frac[d]);
    }
    if (weight != 0.0) out += weight * values[lex(m)];
  }
  return out;
}

}  // namespace stabkit
