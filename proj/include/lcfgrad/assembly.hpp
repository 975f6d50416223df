#pragma once

#include <Eigen/Sparse>
#include <variant>

#include "lcfgrad/material.hpp"
#include "lcfgrad/mesh.hpp"

namespace lcfgrad {

/// Volume-force and surface-traction models of one load case.
struct LoadCase {
  struct NoVolume {};
  struct ConstantBody {
    Eigen::Vector3d force_density = Eigen::Vector3d::Zero();  // [N/mm^3]
  };
  /// f(ξ) = ρ ω² (0, ξ2, ξ3); the rotation axis is x.
  struct Centrifugal {
    double omega = 0;    // [rad/s]
    double density = 0;  // [tonne/mm^3]
  };
  struct NoTraction {};
  struct FixedTraction {
    Eigen::Vector3d density = Eigen::Vector3d::Zero();  // g [MPa], on traction_faces
  };
  /// g(X) = P / A(X): the density rescales so the total force stays constant.
  struct ForceControlled {
    Eigen::Vector3d total_force = Eigen::Vector3d::Zero();  // P [N]
  };

  std::variant<NoVolume, ConstantBody, Centrifugal> volume;
  std::variant<NoTraction, FixedTraction, ForceControlled> traction;

  bool has_volume() const { return !std::holds_alternative<NoVolume>(volume); }
  bool has_traction() const { return !std::holds_alternative<NoTraction>(traction); }
};

/// Assembled stiffness operator B(X), 3N x 3N, with Dirichlet bookkeeping.
struct SparseSymMatrix {
  Eigen::SparseMatrix<double> mat;
  std::vector<char> constrained;  // per-DoF flags, filled by apply_dirichlet

  int n() const { return static_cast<int>(mat.rows()); }
  bool is_constrained(int dof) const {
    return !constrained.empty() && constrained[dof] != 0;
  }
  double norm_inf() const;
  /// max |B - B^T| over all entries.
  double asymmetry() const;
};

/// B_(j,r),(k,s) = λ Σ_K Σ_l ω_lK ∇_r θ_j ∇_s θ_k
///              + μ Σ_K Σ_l ω_lK (δ_rs ∇θ_j·∇θ_k + ∇_s θ_j ∇_r θ_k),
/// ω_lK = ω̂_l det ∇̂T_K. Local matrices are computed element-parallel and
/// committed in fixed element order, so the result is identical for any
/// thread count.
SparseSymMatrix assemble_stiffness(const Mesh& mesh, const ElasticMaterial& mat,
                                   const QuadratureConfig& quad = {}, int threads = 1);

/// Quadrature area A(X) = Σ_F Σ_l ω_lF of the traction faces.
double traction_area(const Mesh& mesh, const QuadratureConfig& quad = {});

/// F_(j,r) = Σ_K Σ_l ω_lK f_r(ξ_l^K) θ_j + Σ_F Σ_l ω_lF g_r θ_j.
/// For ForceControlled tractions g = P/A(X); throws ZeroArea when A(X) <= 0.
NodalField assemble_load(const Mesh& mesh, const LoadCase& load,
                         const QuadratureConfig& quad = {}, int threads = 1);

/// Symmetric elimination: zero rows/columns, unit diagonal, prescribed values
/// moved to the right-hand side. dof = 3*node + component.
void constrain_dofs(SparseSymMatrix& sys, NodalField& rhs,
                    std::span<const std::pair<int, double>> dof_values);

/// Clamps all three components of each node to zero.
void apply_dirichlet(SparseSymMatrix& sys, NodalField& rhs, std::span<const int> nodes);

/// Zeroes the constrained entries of a right-hand side (adjoint loads).
void constrain_rhs(const SparseSymMatrix& sys, NodalField& rhs);

}  // namespace lcfgrad
