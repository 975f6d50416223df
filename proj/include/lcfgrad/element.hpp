#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

namespace lcfgrad {

enum class ElementKind { Tet4, Hex8, Hex20 };

std::string to_string(ElementKind kind);
ElementKind element_kind_from_string(const std::string& name);  // throws ConfigError

/// Volume quadrature rule with shape values/gradients tabulated at the points.
struct VolumeRule {
  Eigen::Matrix<double, Eigen::Dynamic, 3> points;  // l_q x 3 reference coords
  Eigen::VectorXd weights;
  Eigen::MatrixXd shape;                                          // l_q x n_sh
  std::vector<Eigen::Matrix<double, Eigen::Dynamic, 3>> grad;     // per point: n_sh x 3
};

/// Quadrature on one local face F̂, embedded into the reference element via
/// ξ̂(u,v) = origin + u·a + v·b. Weights live on the 2D parameter domain
/// ([-1,1]^2 for quads, the unit triangle for tets); face_grad holds the
/// tangential derivatives dθ̂/d(u,v) needed for the Gram matrix.
struct FaceRule {
  Eigen::Matrix<double, Eigen::Dynamic, 3> points;  // embedded 3D reference coords
  Eigen::VectorXd weights;
  Eigen::MatrixXd shape;                                          // l_qF x n_sh
  std::vector<Eigen::Matrix<double, Eigen::Dynamic, 3>> grad;     // volume gradients
  std::vector<Eigen::Matrix<double, Eigen::Dynamic, 2>> face_grad;  // tangential
};

/// Options selecting quadrature orders. Zeros mean per-kind defaults:
/// Hex8 2x2x2, Hex20 3x3x3 (or 2x2x2 when reduced_volume), Tet4 4 points;
/// faces 3x3 on quads, 6 points on triangles.
struct QuadratureConfig {
  bool reduced_volume = false;
  int hex_volume_1d = 0;     // 1..3
  int tet_volume_points = 0;  // 1, 4 or 5
  int quad_face_1d = 0;      // 1..6 (up to 36 points per face)
  int tri_face_points = 0;   // 1, 3, 6 or 7
};

struct ReferenceElement {
  ElementKind kind;
  int n_sh;
  int n_faces;
  bool faces_are_quads;
  double reference_volume;        // 8 for hexes, 1/6 for the tet
  double reference_face_measure;  // parameter-domain measure: 4 or 1/2

  Eigen::Matrix<double, Eigen::Dynamic, 3> node_coords;  // n_sh x 3

  struct FaceMap {
    Eigen::Vector3d origin, a, b;       // ξ̂(u,v) = origin + u·a + v·b, a x b outward
    std::vector<int> nodes;             // local node ids, outward-ordered
  };
  std::vector<FaceMap> faces;

  Eigen::VectorXd shape(const Eigen::Vector3d& xi) const;
  Eigen::Matrix<double, Eigen::Dynamic, 3> shape_gradient(const Eigen::Vector3d& xi) const;

  VolumeRule volume_rule(const QuadratureConfig& q = {}) const;
  FaceRule face_rule(int face, const QuadratureConfig& q = {}) const;
  std::vector<FaceRule> all_face_rules(const QuadratureConfig& q = {}) const;

  static const ReferenceElement& get(ElementKind kind);
};

/// 1D Gauss-Legendre rule on [-1,1], n = 1..6.
void gauss_legendre_1d(int n, std::vector<double>& points, std::vector<double>& weights);

}  // namespace lcfgrad
