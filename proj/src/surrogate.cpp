#include "lcfgrad/surrogate.hpp"

#include <cmath>
#include <map>
#include <numbers>

#include "lcfgrad/errors.hpp"

namespace lcfgrad {

namespace {

// CalculiX edge order for the 20-node brick: bottom ring, top ring, verticals.
constexpr int kHexEdge[12][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6},
                                 {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7}};

/// Inserts midside nodes for every hex8 element and rewrites the mesh as hex20.
void promote_to_hex20(Mesh& mesh) {
  std::map<std::pair<int, int>, int> edge_node;
  std::vector<Eigen::Vector3d> extra;
  std::vector<int> conn20;
  const int n0 = mesh.n_nodes();
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto en = mesh.element_nodes(e);
    for (int k = 0; k < 8; ++k) conn20.push_back(en[k]);
    for (const auto& ed : kHexEdge) {
      const int a = en[ed[0]], b = en[ed[1]];
      const auto key = std::minmax(a, b);
      auto it = edge_node.find(key);
      if (it == edge_node.end()) {
        const int id = n0 + static_cast<int>(extra.size());
        extra.push_back(0.5 * (mesh.nodes.row(a) + mesh.nodes.row(b)));
        it = edge_node.emplace(key, id).first;
      }
      conn20.push_back(it->second);
    }
  }
  NodalField nodes(n0 + static_cast<int>(extra.size()), 3);
  nodes.topRows(n0) = mesh.nodes;
  for (size_t i = 0; i < extra.size(); ++i) nodes.row(n0 + static_cast<int>(i)) = extra[i];
  mesh.nodes = std::move(nodes);
  mesh.conn = std::move(conn20);
  mesh.kind = ElementKind::Hex20;
}

/// Splits every hex8 cell into 6 positively oriented tets (Kuhn split).
void split_to_tet4(Mesh& mesh) {
  // Corner bit order used below: c[b] with b = bx + 2 by + 4 bz, derived from
  // the hex's CalculiX corner order.
  constexpr int kHexToBit[8] = {0, 1, 3, 2, 4, 5, 7, 6};
  constexpr int kPerm[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                               {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  std::vector<int> conn4;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto en = mesh.element_nodes(e);
    int c[8];
    for (int k = 0; k < 8; ++k) c[kHexToBit[k]] = en[k];
    for (const auto& p : kPerm) {
      int bits = 0;
      int tet[4];
      tet[0] = c[0];
      for (int s = 0; s < 3; ++s) {
        bits |= 1 << p[s];
        tet[s + 1] = c[bits];
      }
      Eigen::Vector3d v0 = mesh.nodes.row(tet[0]);
      const Eigen::Matrix3d M =
          (Eigen::Matrix3d() << (mesh.nodes.row(tet[1]).transpose() - v0),
           (mesh.nodes.row(tet[2]).transpose() - v0),
           (mesh.nodes.row(tet[3]).transpose() - v0))
              .finished();
      if (M.determinant() < 0) std::swap(tet[2], tet[3]);
      for (int k = 0; k < 4; ++k) conn4.push_back(tet[k]);
    }
  }
  mesh.conn = std::move(conn4);
  mesh.kind = ElementKind::Tet4;
}

}  // namespace

std::vector<FaceRef> faces_where(const Mesh& mesh,
                                 const std::function<bool(const Eigen::Vector3d&)>& pred) {
  const auto& re = mesh.ref();
  std::vector<FaceRef> out;
  for (const FaceRef& f : mesh.surface_faces) {
    const auto en = mesh.element_nodes(f.element);
    bool all = true;
    for (int k : re.faces[f.face].nodes)
      if (!pred(mesh.nodes.row(en[k]))) {
        all = false;
        break;
      }
    if (all) out.push_back(f);
  }
  return out;
}

std::vector<int> nodes_where(const Mesh& mesh,
                             const std::function<bool(const Eigen::Vector3d&)>& pred) {
  std::vector<int> out;
  for (int j = 0; j < mesh.n_nodes(); ++j)
    if (pred(mesh.nodes.row(j))) out.push_back(j);
  return out;
}

void map_nodes(Mesh& mesh, const std::function<Eigen::Vector3d(const Eigen::Vector3d&)>& f) {
  for (int j = 0; j < mesh.n_nodes(); ++j)
    mesh.nodes.row(j) = f(mesh.nodes.row(j)).transpose();
}

Mesh box_mesh(ElementKind kind, int nx, int ny, int nz, const Eigen::Vector3d& lengths,
              bool clamp_xmin, bool load_xmax) {
  if (nx < 1 || ny < 1 || nz < 1) throw ConfigError("box mesh needs at least one cell per axis");
  Mesh mesh;
  mesh.kind = ElementKind::Hex8;
  const int Nx = nx + 1, Ny = ny + 1, Nz = nz + 1;
  mesh.nodes.resize(Nx * Ny * Nz, 3);
  auto id = [&](int i, int j, int k) { return (i * Ny + j) * Nz + k; };
  for (int i = 0; i < Nx; ++i)
    for (int j = 0; j < Ny; ++j)
      for (int k = 0; k < Nz; ++k)
        mesh.nodes.row(id(i, j, k)) << lengths.x() * i / nx, lengths.y() * j / ny,
            lengths.z() * k / nz;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j)
      for (int k = 0; k < nz; ++k) {
        const int c[8] = {id(i, j, k),         id(i + 1, j, k),
                          id(i + 1, j + 1, k), id(i, j + 1, k),
                          id(i, j, k + 1),     id(i + 1, j, k + 1),
                          id(i + 1, j + 1, k + 1), id(i, j + 1, k + 1)};
        mesh.conn.insert(mesh.conn.end(), c, c + 8);
      }

  if (kind == ElementKind::Hex20) promote_to_hex20(mesh);
  if (kind == ElementKind::Tet4) split_to_tet4(mesh);

  mesh.surface_faces = extract_boundary(mesh);
  const double tol = 1e-9 * (1.0 + lengths.norm());
  if (clamp_xmin)
    mesh.dirichlet_nodes = nodes_where(mesh, [&](const Eigen::Vector3d& p) {
      return std::abs(p.x()) < tol;
    });
  if (load_xmax)
    mesh.traction_faces = faces_where(mesh, [&](const Eigen::Vector3d& p) {
      return std::abs(p.x() - lengths.x()) < tol;
    });
  mesh.finalize();
  return mesh;
}

Mesh bent_rod_mesh(ElementKind kind, int nx, int ny, int nz, double length, double height,
                   double width) {
  Mesh mesh = box_mesh(kind, nx, ny, nz, {length, width, width}, true, true);
  // Shift the section centers along a sine bump; end faces stay in place.
  map_nodes(mesh, [&](const Eigen::Vector3d& p) {
    return Eigen::Vector3d(p.x(), p.y() + height * std::sin(std::numbers::pi * p.x() / length),
                           p.z());
  });
  return mesh;
}

Mesh ring_mesh(ElementKind kind, int n_axial, int n_radial, int n_theta, double r_inner,
               double r_outer, double width) {
  if (n_theta < 3) throw ConfigError("ring mesh needs at least 3 cells around");
  Mesh mesh;
  mesh.kind = ElementKind::Hex8;
  const int Ni = n_axial + 1, Nj = n_radial + 1;
  mesh.nodes.resize(Ni * Nj * n_theta, 3);
  auto id = [&](int i, int j, int k) { return (i * Nj + j) * n_theta + (k % n_theta); };
  for (int i = 0; i < Ni; ++i)
    for (int j = 0; j < Nj; ++j)
      for (int k = 0; k < n_theta; ++k) {
        const double x = width * i / n_axial;
        const double r = r_inner + (r_outer - r_inner) * j / n_radial;
        const double th = 2.0 * std::numbers::pi * k / n_theta;
        mesh.nodes.row(id(i, j, k)) << x, r * std::cos(th), r * std::sin(th);
      }
  for (int i = 0; i < n_axial; ++i)
    for (int j = 0; j < n_radial; ++j)
      for (int k = 0; k < n_theta; ++k) {
        const int c[8] = {id(i, j, k),         id(i + 1, j, k),
                          id(i + 1, j + 1, k), id(i, j + 1, k),
                          id(i, j, k + 1),     id(i + 1, j, k + 1),
                          id(i + 1, j + 1, k + 1), id(i, j + 1, k + 1)};
        mesh.conn.insert(mesh.conn.end(), c, c + 8);
      }
  if (kind == ElementKind::Hex20) promote_to_hex20(mesh);
  if (kind == ElementKind::Tet4) split_to_tet4(mesh);

  mesh.surface_faces = extract_boundary(mesh);
  const double rtol = r_inner * (1 + 1e-9) + 1e-12;
  mesh.dirichlet_nodes = nodes_where(mesh, [&](const Eigen::Vector3d& p) {
    return std::hypot(p.y(), p.z()) <= rtol;
  });
  mesh.finalize();
  return mesh;
}

Mesh spherical_shell_mesh(int n_radial, int n_theta, int n_phi, double radius,
                          double thickness) {
  Mesh mesh = box_mesh(ElementKind::Hex8, n_radial, n_theta, n_phi, {1, 1, 1}, false, false);
  mesh.dirichlet_nodes.clear();
  mesh.traction_faces.clear();
  map_nodes(mesh, [&](const Eigen::Vector3d& p) {
    const double r = radius - thickness + thickness * p.x();
    const double theta = -0.5 + 1.0 * p.y();   // azimuth patch [rad]
    const double phi = -0.5 + 1.0 * p.z();     // polar patch away from poles
    return Eigen::Vector3d(r * std::cos(phi) * std::cos(theta),
                           r * std::cos(phi) * std::sin(theta), r * std::sin(phi));
  });
  mesh.finalize();
  return mesh;
}

}  // namespace lcfgrad
