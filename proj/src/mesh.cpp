#include "pxlap/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pxlap/error.hpp"

namespace pxl {

MeshPtr Mesh::interval(double a, double b, int n_cells) {
  if (!(std::isfinite(a) && std::isfinite(b)) || !(a < b)) {
    throw Error(ErrorCode::kInvalidArgument, "degenerate interval: need a < b");
  }
  if (n_cells < 2) {
    throw Error(ErrorCode::kInvalidArgument, "interval needs n_cells >= 2");
  }
  auto m = std::shared_ptr<Mesh>(new Mesh());
  m->dim_ = 1;
  m->nx_ = n_cells;
  m->ny_ = 0;
  m->bounds_ = {a, b, 0.0, 0.0};
  const double h = (b - a) / n_cells;
  for (int j = 0; j <= n_cells; ++j) {
    double x = j == n_cells ? b : a + h * j;
    m->nodes_.push_back({x, 0.0});
    m->boundary_.push_back(j == 0 || j == n_cells);
  }
  for (int j = 0; j < n_cells; ++j) {
    auto l = static_cast<std::uint32_t>(j);
    m->cells_.push_back(l);
    m->cells_.push_back(l + 1);
    double len = m->nodes_[l + 1][0] - m->nodes_[l][0];
    m->measures_.push_back(len);
    m->quad_points_.push_back({0.5 * (m->nodes_[l][0] + m->nodes_[l + 1][0]), 0.0});
    m->stencils_.push_back({l + 1, l, 1.0 / len});
    m->stencils_.push_back({});
  }
  m->finish();
  return m;
}

MeshPtr Mesh::rectangle(double ax, double bx, double ay, double by, int nx, int ny) {
  if (!(ax < bx) || !(ay < by) || !std::isfinite(ax) || !std::isfinite(bx) ||
      !std::isfinite(ay) || !std::isfinite(by)) {
    throw Error(ErrorCode::kInvalidArgument, "degenerate rectangle");
  }
  if (nx < 2 || ny < 2) {
    throw Error(ErrorCode::kInvalidArgument, "rectangle needs nx, ny >= 2");
  }
  auto m = std::shared_ptr<Mesh>(new Mesh());
  m->dim_ = 2;
  m->nx_ = nx;
  m->ny_ = ny;
  m->bounds_ = {ax, bx, ay, by};
  const double hx = (bx - ax) / nx;
  const double hy = (by - ay) / ny;
  auto id = [nx](int i, int j) { return static_cast<std::uint32_t>(j * (nx + 1) + i); };
  for (int j = 0; j <= ny; ++j) {
    double y = j == ny ? by : ay + hy * j;
    for (int i = 0; i <= nx; ++i) {
      double x = i == nx ? bx : ax + hx * i;
      m->nodes_.push_back({x, y});
      m->boundary_.push_back(i == 0 || i == nx || j == 0 || j == ny);
    }
  }
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const auto n00 = id(i, j), n10 = id(i + 1, j), n01 = id(i, j + 1),
                 n11 = id(i + 1, j + 1);
      const double dx = m->nodes_[n10][0] - m->nodes_[n00][0];
      const double dy = m->nodes_[n01][1] - m->nodes_[n00][1];
      // lower-left triangle, legs from n00
      for (auto n : {n00, n10, n01}) m->cells_.push_back(n);
      m->measures_.push_back(0.5 * dx * dy);
      m->stencils_.push_back({n10, n00, 1.0 / dx});
      m->stencils_.push_back({n01, n00, 1.0 / dy});
      // upper-right triangle, legs from n11
      for (auto n : {n11, n01, n10}) m->cells_.push_back(n);
      m->measures_.push_back(0.5 * dx * dy);
      m->stencils_.push_back({n11, n01, 1.0 / dx});
      m->stencils_.push_back({n11, n10, 1.0 / dy});
    }
  }
  for (std::size_t c = 0; c < m->measures_.size(); ++c) {
    Point q{0.0, 0.0};
    for (std::size_t k = 0; k < 3; ++k) {
      const Point& p = m->nodes_[m->cells_[3 * c + k]];
      q[0] += p[0] / 3.0;
      q[1] += p[1] / 3.0;
    }
    m->quad_points_.push_back(q);
  }
  m->finish();
  return m;
}

void Mesh::finish() {
  lumped_.assign(nodes_.size(), 0.0);
  total_measure_ = 0.0;
  const std::size_t k = nodes_per_cell();
  for (std::size_t c = 0; c < measures_.size(); ++c) {
    total_measure_ += measures_[c];
    for (std::size_t v = 0; v < k; ++v) {
      lumped_[cells_[c * k + v]] += measures_[c] / static_cast<double>(k);
    }
  }
}

std::pair<std::size_t, double> Mesh::inward_neighbor(std::size_t b) const {
  if (dim_ == 1) {
    if (b == 0) return {1, nodes_[1][0] - nodes_[0][0]};
    std::size_t last = nodes_.size() - 1;
    return {last - 1, nodes_[last][0] - nodes_[last - 1][0]};
  }
  const int i = static_cast<int>(b % static_cast<std::size_t>(nx_ + 1));
  const int j = static_cast<int>(b / static_cast<std::size_t>(nx_ + 1));
  int ii = i, jj = j;
  if (i == 0) ii = 1;
  if (i == nx_) ii = nx_ - 1;
  if (j == 0) jj = 1;
  if (j == ny_) jj = ny_ - 1;
  std::size_t n = static_cast<std::size_t>(jj * (nx_ + 1) + ii);
  double dx = nodes_[n][0] - nodes_[b][0];
  double dy = nodes_[n][1] - nodes_[b][1];
  return {n, std::hypot(dx, dy)};
}

std::vector<std::size_t> Mesh::interior_nodes() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!boundary_[i]) out.push_back(i);
  }
  return out;
}

NodeField::NodeField(MeshPtr mesh, std::vector<double> values)
    : mesh_(std::move(mesh)), values_(std::move(values)) {
  if (!mesh_) throw Error(ErrorCode::kInvalidArgument, "null mesh");
  if (values_.size() != mesh_->node_count()) {
    throw Error(ErrorCode::kMeshMismatch,
                "node field has " + std::to_string(values_.size()) +
                    " values, mesh has " + std::to_string(mesh_->node_count()) +
                    " nodes");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidArgument, "node field value is not finite");
    }
  }
}

NodeField::NodeField(MeshPtr mesh, double constant)
    : NodeField(mesh, std::vector<double>(mesh ? mesh->node_count() : 0, constant)) {}

double NodeField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double NodeField::max() const { return *std::max_element(values_.begin(), values_.end()); }

double NodeField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::fabs(v));
  return m;
}

double NodeField::cell_average(std::size_t c) const { return cell_mean(*mesh_, values_, c); }

double cell_mean(const Mesh& mesh, std::span<const double> nodal, std::size_t c) {
  auto nodes = mesh.cell_nodes(c);
  double s = 0.0;
  for (auto n : nodes) s += nodal[n];
  return s / static_cast<double>(nodes.size());
}

CellVectorField::CellVectorField(MeshPtr mesh, std::vector<Vec2> vectors)
    : mesh_(std::move(mesh)), vectors_(std::move(vectors)) {
  if (vectors_.size() != mesh_->cell_count()) {
    throw Error(ErrorCode::kMeshMismatch, "cell field size does not match mesh");
  }
}

Vec2 cell_gradient(const Mesh& mesh, std::span<const double> nodal, std::size_t c) {
  Vec2 g{0.0, 0.0};
  for (int a = 0; a < mesh.dimension(); ++a) {
    const AxisStencil& s = mesh.stencil(c, a);
    g[static_cast<std::size_t>(a)] = (nodal[s.plus] - nodal[s.minus]) * s.inv_h;
  }
  return g;
}

CellVectorField gradient(const NodeField& u) {
  const Mesh& m = u.mesh();
  std::vector<Vec2> g(m.cell_count());
  for (std::size_t c = 0; c < m.cell_count(); ++c) g[c] = cell_gradient(m, u.values(), c);
  return CellVectorField(u.mesh_ptr(), std::move(g));
}

double integrate(const Mesh& mesh, std::span<const double> cell_values) {
  if (cell_values.size() != mesh.cell_count()) {
    throw Error(ErrorCode::kMeshMismatch, "integrand size does not match cell count");
  }
  double s = 0.0;
  for (std::size_t c = 0; c < cell_values.size(); ++c) {
    s += cell_values[c] * mesh.cell_measure(c);
  }
  return s;
}

double integrate(const NodeField& u) {
  const Mesh& m = u.mesh();
  double s = 0.0;
  for (std::size_t c = 0; c < m.cell_count(); ++c) {
    s += u.cell_average(c) * m.cell_measure(c);
  }
  return s;
}

NodeField interpolate(const MeshPtr& mesh, const ScalarExpr& f) {
  if (mesh->dimension() == 1 && f.uses_y()) {
    throw Error(ErrorCode::kInvalidArgument,
                "expression '" + f.source() + "' references y on a 1D mesh");
  }
  std::vector<double> v(mesh->node_count());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point& p = mesh->node(i);
    v[i] = f(p[0], p[1]);
  }
  return NodeField(mesh, std::move(v));
}

void require_same_mesh(const NodeField& a, const NodeField& b) {
  if (a.mesh_ptr() != b.mesh_ptr()) {
    throw Error(ErrorCode::kMeshMismatch, "fields live on different meshes");
  }
}

}  // namespace pxl
