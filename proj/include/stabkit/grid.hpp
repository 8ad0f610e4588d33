#pragma once

#include <vector>

#include "stabkit/system.hpp"

namespace stabkit {

// Uniform grid over [-radius, radius]^dim with an odd point count per axis,
// so 0 is a node and coordinates are sign-symmetric bit-for-bit. Nodes are
// addressed by a lexicographic index (first axis most significant) and
// ordered for solving in expanding max-norm shells around the origin, ties
// broken lexicographically.
class BoxGrid {
 public:
  BoxGrid(int dim, double radius, int points_per_axis);

  int dim() const { return dim_; }
  double radius() const { return radius_; }
  int per_axis() const { return per_axis_; }
  int size() const { return size_; }
  double spacing() const { return spacing_; }

  double coord(int axis_index) const { return coords_[axis_index]; }
  std::vector<int> multi(int lex) const;
  int lex(const std::vector<int>& multi) const;
  Vector point(int lex) const;
  int shell(int lex) const;  // max |i_j - center|
  int center() const { return (per_axis_ - 1) / 2; }

  // Lex indices sorted by (shell, lex); order()[0] is the origin.
  const std::vector<int>& order() const { return order_; }

  // The shell-(s-1) neighbor obtained by stepping every extremal axis one
  // node toward the center. Equals lex itself only for the origin.
  int inward_neighbor(int lex) const;

  // Multilinear interpolation of per-node vectors (indexed by lex); points
  // beyond the box extrapolate linearly from the edge cells.
  Vector interpolate(const std::vector<Vector>& values, const Vector& y) const;

 private:
  int dim_;
  double radius_;
  int per_axis_;
  int size_;
  double spacing_;
  std::vector<double> coords_;
  std::vector<int> order_;
};

}  // namespace stabkit
