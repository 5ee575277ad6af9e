#include "pxflow/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace pxf {

std::string family_name(Family f) {
  switch (f) {
    case Family::P0: return "P0";
    case Family::P1c: return "P1c";
    case Family::P2c: return "P2c";
    case Family::P1cBubble: return "P1c+bubble";
  }
  return "?";
}

int local_count(Family f) {
  switch (f) {
    case Family::P0: return 1;
    case Family::P1c: return 3;
    case Family::P2c: return 6;
    case Family::P1cBubble: return 4;
  }
  return 0;
}

void eval_basis(Family f, double xi, double eta, double* v, double g[][2]) {
  const double l0 = 1.0 - xi - eta, l1 = xi, l2 = eta;
  switch (f) {
    case Family::P0:
      v[0] = 1.0;
      g[0][0] = g[0][1] = 0.0;
      break;
    case Family::P1c:
      v[0] = l0;
      v[1] = l1;
      v[2] = l2;
      g[0][0] = -1.0; g[0][1] = -1.0;
      g[1][0] = 1.0;  g[1][1] = 0.0;
      g[2][0] = 0.0;  g[2][1] = 1.0;
      break;
    case Family::P2c:
      // vertices, then midpoints of local edges (0,1), (1,2), (2,0)
      v[0] = l0 * (2.0 * l0 - 1.0);
      v[1] = l1 * (2.0 * l1 - 1.0);
      v[2] = l2 * (2.0 * l2 - 1.0);
      v[3] = 4.0 * l0 * l1;
      v[4] = 4.0 * l1 * l2;
      v[5] = 4.0 * l2 * l0;
      g[0][0] = 1.0 - 4.0 * l0;        g[0][1] = 1.0 - 4.0 * l0;
      g[1][0] = 4.0 * l1 - 1.0;        g[1][1] = 0.0;
      g[2][0] = 0.0;                   g[2][1] = 4.0 * l2 - 1.0;
      g[3][0] = 4.0 * (l0 - l1);       g[3][1] = -4.0 * l1;
      g[4][0] = 4.0 * l2;              g[4][1] = 4.0 * l1;
      g[5][0] = -4.0 * l2;             g[5][1] = 4.0 * (l0 - l2);
      break;
    case Family::P1cBubble:
      v[0] = l0;
      v[1] = l1;
      v[2] = l2;
      v[3] = 27.0 * l0 * l1 * l2;
      g[0][0] = -1.0; g[0][1] = -1.0;
      g[1][0] = 1.0;  g[1][1] = 0.0;
      g[2][0] = 0.0;  g[2][1] = 1.0;
      g[3][0] = 27.0 * (l0 * l2 - l1 * l2);
      g[3][1] = 27.0 * (l0 * l1 - l1 * l2);
      break;
  }
}

FeSpace build_space(const Triangulation& m, Family f, int value_dim) {
  FeSpace s;
  s.family = f;
  s.value_dim = value_dim;
  s.mesh = &m;
  s.local_size = local_count(f);
  const int nv = m.n_vertices();
  const int nt = m.n_triangles();
  s.element_dofs.assign(nt, {});

  if (f == Family::P0) {
    s.n_scalar_dofs = nt;
    for (int t = 0; t < nt; ++t) s.element_dofs[t] = {t};
    s.dof_points.resize(nt);
    for (int t = 0; t < nt; ++t) s.dof_points[t] = m.geometry(t).barycenter;
  } else if (f == Family::P1c) {
    s.n_scalar_dofs = nv;
    for (int t = 0; t < nt; ++t) {
      const auto& tri = m.triangle(t);
      s.element_dofs[t] = {tri[0], tri[1], tri[2]};
    }
    s.dof_points = m.vertices();
  } else if (f == Family::P1cBubble) {
    s.n_scalar_dofs = nv + nt;
    for (int t = 0; t < nt; ++t) {
      const auto& tri = m.triangle(t);
      s.element_dofs[t] = {tri[0], tri[1], tri[2], nv + t};
    }
    s.dof_points = m.vertices();
    s.dof_points.resize(nv + nt);
    for (int t = 0; t < nt; ++t) s.dof_points[nv + t] = m.geometry(t).barycenter;
  } else {  // P2c
    // global edge ids: sorted vertex pairs in lexicographic order
    std::map<std::pair<int, int>, int> edge_id;
    for (int t = 0; t < nt; ++t) {
      const auto& tri = m.triangle(t);
      for (int k = 0; k < 3; ++k) {
        const int a = tri[k], b = tri[(k + 1) % 3];
        edge_id.emplace(std::minmax(a, b), 0);
      }
    }
    int next = 0;
    for (auto& [e, id] : edge_id) id = next++;
    const int ne = next;
    s.n_scalar_dofs = nv + ne;
    s.dof_points = m.vertices();
    s.dof_points.resize(nv + ne);
    for (const auto& [e, id] : edge_id)
      s.dof_points[nv + id] = (m.vertex(e.first) + m.vertex(e.second)) * 0.5;
    for (int t = 0; t < nt; ++t) {
      const auto& tri = m.triangle(t);
      auto eid = [&](int a, int b) { return nv + edge_id.at(std::minmax(a, b)); };
      s.element_dofs[t] = {tri[0], tri[1], tri[2], eid(tri[0], tri[1]), eid(tri[1], tri[2]),
                           eid(tri[2], tri[0])};
    }
  }

  s.n_dofs = s.n_scalar_dofs * value_dim;

  s.is_boundary_scalar.assign(s.n_scalar_dofs, false);
  if (f == Family::P1c || f == Family::P1cBubble) {
    for (const auto& be : m.boundary_edges()) {
      s.is_boundary_scalar[be.a] = true;
      s.is_boundary_scalar[be.b] = true;
    }
  } else if (f == Family::P2c) {
    std::map<std::pair<int, int>, int> edge_seen;
    for (int t = 0; t < m.n_triangles(); ++t) {
      const auto& tri = m.triangle(t);
      for (int k = 0; k < 3; ++k)
        edge_seen.emplace(std::minmax(tri[k], tri[(k + 1) % 3]), s.element_dofs[t][3 + k]);
    }
    for (const auto& be : m.boundary_edges()) {
      s.is_boundary_scalar[be.a] = true;
      s.is_boundary_scalar[be.b] = true;
      auto it = edge_seen.find(std::minmax(be.a, be.b));
      if (it == edge_seen.end()) throw MeshError("boundary edge missing from triangulation");
      s.is_boundary_scalar[it->second] = true;
    }
  }
  for (int d = 0; d < s.n_scalar_dofs; ++d)
    if (s.is_boundary_scalar[d]) s.boundary_scalar_dofs.push_back(d);
  return s;
}

const BasisTable& basis_table(Family f, const QuadratureRule& r) {
  static std::map<std::pair<int, int>, BasisTable> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  const auto key = std::make_pair(static_cast<int>(f), r.degree);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  BasisTable tab;
  const int nloc = local_count(f);
  tab.values.resize(r.size());
  tab.ref_grads_x.resize(r.size());
  tab.ref_grads_y.resize(r.size());
  double v[6];
  double g[6][2];
  for (int q = 0; q < r.size(); ++q) {
    eval_basis(f, r.points[q].l1, r.points[q].l2, v, g);
    tab.values[q].assign(v, v + nloc);
    tab.ref_grads_x[q].resize(nloc);
    tab.ref_grads_y[q].resize(nloc);
    for (int i = 0; i < nloc; ++i) {
      tab.ref_grads_x[q][i] = g[i][0];
      tab.ref_grads_y[q][i] = g[i][1];
    }
  }
  return cache.emplace(key, std::move(tab)).first->second;
}

namespace {

bool is_nodal_dof(Family f, int scalar_dof, int n_vertices) {
  switch (f) {
    case Family::P0: return true;       // barycenter value
    case Family::P1c: return true;
    case Family::P2c: return true;      // vertices and edge midpoints
    case Family::P1cBubble: return scalar_dof < n_vertices;
  }
  return true;
}

}  // namespace

std::vector<double> interpolate(const FeSpace& space, const std::function<double(Vec2)>& f) {
  std::vector<double> dofs(space.n_dofs, 0.0);
  if (space.value_dim != 1) throw std::invalid_argument("scalar interpolate on vector space");
  const int nv = space.mesh->n_vertices();
  for (int d = 0; d < space.n_scalar_dofs; ++d) {
    if (!is_nodal_dof(space.family, d, nv)) continue;
    const double val = f(space.dof_points[d]);
    if (!std::isfinite(val))
      throw std::domain_error("interpolate: function not finite at a nodal point");
    dofs[d] = val;
  }
  return dofs;
}

std::vector<double> interpolate(const FeSpace& space, const std::function<Vec2(Vec2)>& f) {
  if (space.value_dim != 2) throw std::invalid_argument("vector interpolate on scalar space");
  std::vector<double> dofs(space.n_dofs, 0.0);
  const int nv = space.mesh->n_vertices();
  for (int d = 0; d < space.n_scalar_dofs; ++d) {
    if (!is_nodal_dof(space.family, d, nv)) continue;
    const Vec2 val = f(space.dof_points[d]);
    if (!std::isfinite(val.x) || !std::isfinite(val.y))
      throw std::domain_error("interpolate: function not finite at a nodal point");
    dofs[space.global_dof(d, 0)] = val.x;
    dofs[space.global_dof(d, 1)] = val.y;
  }
  return dofs;
}

double eval_scalar(const FeSpace& space, const std::vector<double>& dofs, int elem, double xi,
                   double eta) {
  double v[6];
  double g[6][2];
  eval_basis(space.family, xi, eta, v, g);
  double sum = 0.0;
  const auto& ed = space.element_dofs[elem];
  for (int i = 0; i < space.local_size; ++i) sum += dofs[ed[i]] * v[i];
  return sum;
}

}  // namespace pxf
