#pragma once

#include <functional>
#include <string>

#include "lcfgrad/adjoint.hpp"

namespace lcfgrad {

enum class FdScheme { Forward, Central };

/// One direction's finite-difference sweep against an analytic value.
struct FdReport {
  std::string name;
  double analytic = 0;
  std::vector<double> eps;
  std::vector<double> fd_value;
  std::vector<char> valid;  // false where a step inverted an element
  double best_rel_error = 0;    // best single-ε agreement (reported value)
  double best_eps = 0;
  // smallest error certified by two adjacent ε whose errors agree within 2x
  // (the lucky-cancellation guard: one accidental crossing cannot produce it)
  double stable_rel_error = 0;
  bool plateau = false;  // a consistent adjacent pair exists at all

  bool passes(double threshold) const {
    return plateau && best_rel_error <= threshold && stable_rel_error <= threshold;
  }
};

/// Default ε grid: the seven decades 1e-2..1e-8 scaled by `length_scale`.
std::vector<double> default_eps_grid(double length_scale);

/// Sweeps (J(X+εV) - J(X-εV)) / 2ε (or the forward quotient) over the ε grid
/// and compares against `analytic`. Steps where the evaluator reports a
/// degenerate element are recorded as invalid and skipped.
FdReport fd_directional(const std::string& name,
                        const std::function<double(const NodalField&)>& j_of_x,
                        const NodalField& X, const NodalField& V, double analytic,
                        std::span<const double> eps_grid,
                        FdScheme scheme = FdScheme::Central);

/// Λᵀ (B(X+εV) - B(X-εV)) U / 2ε: the matrix-difference oracle for the
/// stiffness contraction, for small meshes.
double matrix_fd(const Mesh& mesh, const ElasticMaterial& mat, const NodalField& U,
                 const NodalField& lambda, const NodalField& V, double eps,
                 const QuadratureConfig& quad = {});

/// The registered oracle suite: one entry per adjoint ingredient. Runs the
/// checks of the shape-sensitivity machinery against finite differences over
/// a fixed direction set (surface normal field, V ∝ X, V ∝ U on the surface,
/// two seeded random fields).
struct SuiteThresholds {
  double partial = 0.002;  // ∂J/∂U, ∂J/∂X
  double contraction = 0.002;
  double total = 0.01;
};

struct SuiteResult {
  std::vector<FdReport> reports;
  bool passed = true;
};

SuiteResult run_validation_suite(const Mesh& mesh, const ElasticMaterial& elastic,
                                 const LcfMaterial& lcf, const LoadCase& load,
                                 const QuadratureConfig& quad = {},
                                 const SolverOptions& solver = {},
                                 const SuiteThresholds& thresholds = {},
                                 unsigned seed = 20240608, int threads = 1);

}  // namespace lcfgrad
