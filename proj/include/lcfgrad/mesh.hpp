#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <span>
#include <vector>

#include "lcfgrad/element.hpp"

namespace lcfgrad {

/// N x 3 array of per-node 3-vectors (coordinates X, displacements U,
/// adjoint state Λ, nodal gradients). Row-major so that the flattened view
/// matches the global DoF ordering dof = 3*node + component.
using NodalField = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

struct FaceRef {
  int element = -1;
  int face = -1;
  friend bool operator==(const FaceRef&, const FaceRef&) = default;
  friend auto operator<=>(const FaceRef&, const FaceRef&) = default;
};

/// Immutable after construction; safe for concurrent reads.
struct Mesh {
  ElementKind kind = ElementKind::Hex8;
  NodalField nodes;                    // X, in mm
  std::vector<int> conn;               // n_elements * n_sh node indices
  std::vector<FaceRef> surface_faces;  // boundary of the mesh, sorted
  std::vector<int> dirichlet_nodes;    // clamped nodes, sorted
  std::vector<FaceRef> traction_faces;  // loaded region A ⊆ surface_faces

  int n_nodes() const { return static_cast<int>(nodes.rows()); }
  int nodes_per_element() const { return ReferenceElement::get(kind).n_sh; }
  int n_elements() const {
    return conn.empty() ? 0 : static_cast<int>(conn.size()) / nodes_per_element();
  }
  std::span<const int> element_nodes(int e) const {
    const int n = nodes_per_element();
    return {conn.data() + static_cast<size_t>(e) * n, static_cast<size_t>(n)};
  }
  const ReferenceElement& ref() const { return ReferenceElement::get(kind); }

  /// Gathers the element's node coordinates as an n_sh x 3 block.
  Eigen::Matrix<double, Eigen::Dynamic, 3> element_coords(int e) const;

  /// Bounding-box diagonal of an element (degeneracy scale).
  double element_char_length(int e) const;
  /// Bounding-box diagonal of the whole mesh.
  double char_length() const;

  /// Fills surface_faces from the connectivity and checks all invariants;
  /// throws NonManifold / ConfigError on violations.
  void finalize();
  void validate() const;
};

/// Faces referenced by exactly one element, sorted by (element, face).
/// Throws NonManifold when a face is shared by more than two elements.
std::vector<FaceRef> extract_boundary(const Mesh& mesh);

/// T_K(ξ̂) = Σ_j θ̂_j(ξ̂) X_j^K
Eigen::Vector3d transform(const Mesh& mesh, int element, const Eigen::Vector3d& xi);

/// ∇̂T_K(ξ̂), entry (s,k) = Σ_r X_rs ∂θ̂_r/∂ξ̂_k. Throws DegenerateElement when
/// det drops below 1e-12 times the element length scale cubed.
Eigen::Matrix3d jacobian(const Mesh& mesh, int element, const Eigen::Vector3d& xi);

struct FaceGram {
  Eigen::Matrix2d g;
  double sqrt_det = 0;
};

/// Gram matrix g_F = J_F^T J_F of the face tangent map at a parameter-domain
/// point (u,v); throws DegenerateFace when det g is not positive.
FaceGram face_gram(const Mesh& mesh, FaceRef face, const Eigen::Vector2d& uv);

/// JSON mesh file:
///   {"nodes":[[x,y,z],...],
///    "elements":{"kind":"HEX8","conn":[[...],...]},
///    "sets":{"dirichlet":[ids],"traction_faces":[[elem,face],...]}}
Mesh read_mesh_json(const std::filesystem::path& path);
void write_mesh_json(const Mesh& mesh, const std::filesystem::path& path);

}  // namespace lcfgrad
