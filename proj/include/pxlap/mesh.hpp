#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "pxlap/expr.hpp"

namespace pxl {

using Point = std::array<double, 2>;
using Vec2 = std::array<double, 2>;

/// One axis of a cell gradient: d u / d x_axis = (u[plus] - u[minus]) * inv_h.
/// Every cell (segment, or right triangle of a split quad) has axis-aligned
/// legs, so its constant gradient is a pair of nodal differences.
struct AxisStencil {
  std::uint32_t plus = 0;
  std::uint32_t minus = 0;
  double inv_h = 0.0;
};

/// Uniform mesh of an interval (segments) or an axis-aligned rectangle
/// (each quad split into two triangles along the (i+1,j)-(i,j+1) diagonal).
///
/// Nodes are ordered lexicographically with x running fastest. One
/// quadrature point per cell: the midpoint in 1D, the centroid in 2D.
/// Immutable after construction.
class Mesh {
 public:
  static std::shared_ptr<const Mesh> interval(double a, double b, int n_cells);
  static std::shared_ptr<const Mesh> rectangle(double ax, double bx, double ay,
                                               double by, int nx, int ny);

  int dimension() const { return dim_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t cell_count() const { return measures_.size(); }
  std::size_t nodes_per_cell() const { return dim_ == 1 ? 2 : 3; }

  const Point& node(std::size_t i) const { return nodes_[i]; }
  bool is_boundary(std::size_t i) const { return boundary_[i] != 0; }
  std::span<const std::uint32_t> cell_nodes(std::size_t c) const {
    return {cells_.data() + c * nodes_per_cell(), nodes_per_cell()};
  }
  double cell_measure(std::size_t c) const { return measures_[c]; }
  const Point& quad_point(std::size_t c) const { return quad_points_[c]; }
  const AxisStencil& stencil(std::size_t c, int axis) const {
    return stencils_[c * 2 + static_cast<std::size_t>(axis)];
  }

  /// Lumped mass: sum over incident cells of measure / nodes_per_cell.
  double lumped_measure(std::size_t i) const { return lumped_[i]; }

  /// For a boundary node, the nearest interior node (index, distance); for a
  /// mesh without interior nodes returns the node itself with distance 0.
  std::pair<std::size_t, double> inward_neighbor(std::size_t boundary_node) const;

  double total_measure() const { return total_measure_; }
  std::array<int, 2> resolution() const { return {nx_, ny_}; }
  std::array<double, 4> bounds() const { return bounds_; }

  std::vector<std::size_t> interior_nodes() const;

 private:
  Mesh() = default;
  void finish();

  int dim_ = 1;
  int nx_ = 0;
  int ny_ = 0;
  std::array<double, 4> bounds_{};
  std::vector<Point> nodes_;
  std::vector<std::uint8_t> boundary_;
  std::vector<std::uint32_t> cells_;
  std::vector<double> measures_;
  std::vector<Point> quad_points_;
  std::vector<AxisStencil> stencils_;
  std::vector<double> lumped_;
  double total_measure_ = 0.0;
};

using MeshPtr = std::shared_ptr<const Mesh>;

/// Scalar values at the nodes of a mesh.
class NodeField {
 public:
  NodeField() = default;
  NodeField(MeshPtr mesh, std::vector<double> values);
  NodeField(MeshPtr mesh, double constant);

  const MeshPtr& mesh_ptr() const { return mesh_; }
  const Mesh& mesh() const { return *mesh_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }

  double min() const;
  double max() const;
  double max_abs() const;

  /// Mean of the nodal values of cell c (its quadrature-point value).
  double cell_average(std::size_t c) const;

 private:
  MeshPtr mesh_;
  std::vector<double> values_;
};

/// One gradient vector per cell. Unused components (1D) are zero.
class CellVectorField {
 public:
  CellVectorField(MeshPtr mesh, std::vector<Vec2> vectors);

  const Mesh& mesh() const { return *mesh_; }
  std::size_t size() const { return vectors_.size(); }
  const Vec2& operator[](std::size_t c) const { return vectors_[c]; }

 private:
  MeshPtr mesh_;
  std::vector<Vec2> vectors_;
};

/// Mean of the nodal values of cell c.
double cell_mean(const Mesh& mesh, std::span<const double> nodal, std::size_t c);

/// Gradient of the nodal values of cell c.
Vec2 cell_gradient(const Mesh& mesh, std::span<const double> nodal, std::size_t c);

CellVectorField gradient(const NodeField& u);

/// Sum over cells of value(c) * measure(c), in fixed cell order.
double integrate(const Mesh& mesh, std::span<const double> cell_values);

/// Nodal values are averaged to the quadrature point of each cell first.
double integrate(const NodeField& u);

NodeField interpolate(const MeshPtr& mesh, const ScalarExpr& f);

void require_same_mesh(const NodeField& a, const NodeField& b);

}  // namespace pxl
