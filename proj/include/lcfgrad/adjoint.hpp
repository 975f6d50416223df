#pragma once

#include "lcfgrad/life.hpp"
#include "lcfgrad/solve.hpp"

namespace lcfgrad {

/// Face- or element-local gradient blocks (3 x n_sh per entity) plus the
/// parent element ids that map local dofs to global nodes.
struct LocalGradientBatch {
  std::vector<int> element;               // parent element per entity
  std::vector<Eigen::Matrix3Xd> values;   // per entity: 3 x n_sh
};

/// Scatter-adds a batch into a nodal field via the connectivity, in fixed
/// entity order.
NodalField assemble_nodal(const Mesh& mesh, const LocalGradientBatch& batch);

/// ∂J/∂U_loc over surface faces: per face F, local dof k, the chain rule
/// through q → σ_a²/E → RO∘SD̄^{-1} → CMB^{-1} → -m̄ Ni^(-m̄-1), weighted by
/// ω̂_l sqrt(det g_F) and summed over the face quadrature.
LocalGradientBatch objective_du_local(const Mesh& mesh, const ElasticMaterial& elastic,
                                      const LcfMaterial& lcf, const NodalField& U,
                                      const QuadratureConfig& quad = {}, int threads = 1);

/// ∂J/∂X_loc over surface faces: the Gram-determinant derivative of ω_lF plus
/// the chain rule through ∂q/∂X via ∂(∇̂T^T)^{-1} = -(...)^{-1} ∂(∇̂T^T) (...)^{-1}.
LocalGradientBatch objective_dx_local(const Mesh& mesh, const ElasticMaterial& elastic,
                                      const LcfMaterial& lcf, const NodalField& U,
                                      const QuadratureConfig& quad = {}, int threads = 1);

/// Solves B(X) Λ = ∂J/∂U with the state system's Dirichlet constraints
/// (Λ = 0 on constrained DoFs).
NodalField adjoint_solve(const SparseSymMatrix& sys, const NodalField& dj_du,
                         const SolverOptions& opts = {});

/// Λᵀ (∂B/∂X) U, contracted element-locally; the (N×3)³ tensor is never
/// materialized. Per-element staging only, committed in element order.
NodalField stiffness_shape_contraction(const Mesh& mesh, const ElasticMaterial& mat,
                                       const NodalField& U, const NodalField& lambda,
                                       const QuadratureConfig& quad = {}, int threads = 1);

/// Λᵀ (∂F_vol/∂X): the ∂ω_lK term always, plus ρω² θ̂_j e_i (i = 2,3) under
/// centrifugal load.
NodalField volume_load_shape_contraction(const Mesh& mesh, const LoadCase& load,
                                         const NodalField& lambda,
                                         const QuadratureConfig& quad = {},
                                         int threads = 1);

/// Λᵀ (∂F_surf/∂X): the ∂ω_lF term plus, for force-controlled tractions, the
/// area-correction term that keeps the total applied force stationary.
NodalField surface_load_shape_contraction(const Mesh& mesh, const LoadCase& load,
                                          const NodalField& lambda,
                                          const QuadratureConfig& quad = {},
                                          int threads = 1);

/// Outward unit normals, area-weighted over adjacent surface faces; zero rows
/// at interior nodes.
NodalField surface_normals(const Mesh& mesh, const QuadratureConfig& quad = {});

/// field · n̂ per surface node (zero at interior nodes). Throws IsolatedNode
/// when a surface node accumulates a vanishing normal.
Eigen::VectorXd normal_project(const Mesh& mesh, const NodalField& field,
                               const QuadratureConfig& quad = {});

struct ShapeGradient {
  double J = 0;
  double m_bar = 0;
  NodalField dJ_dX;                  // total derivative, [cycles^-m̄ / mm]
  Eigen::VectorXd normal_component;  // dJ/dX · n̂ per surface node

  /// dPoF/dX(t) = t^m̄ exp(-t^m̄ J) dJ/dX; the direction is t-independent.
  NodalField dPoF_dX(double t) const;
};

/// dJ/dX = ∂J/∂X - Λᵀ(∂B/∂X U - ∂F/∂X), assembled to global nodes.
ShapeGradient shape_gradient(const Mesh& mesh, const ElasticMaterial& elastic,
                             const LcfMaterial& lcf, const LoadCase& load,
                             const NodalField& U, const NodalField& lambda,
                             const QuadratureConfig& quad = {}, int threads = 1);

}  // namespace lcfgrad
