#pragma once

#include "lcfgrad/assembly.hpp"

namespace lcfgrad {

struct SolverOptions {
  enum class Method { Direct, ConjugateGradient };
  Method method = Method::Direct;
  double tol = 1e-10;  // relative residual
  int max_iterations = 20000;
};

/// Solves the constrained SPD system B U = F. The returned field satisfies
/// ||B U - F|| <= max(tol, 1e-9) ||F||; otherwise SingularSystem or
/// NoConvergence is thrown. Deterministic for fixed inputs.
NodalField solve(const SparseSymMatrix& sys, const NodalField& rhs,
                 const SolverOptions& opts = {});

}  // namespace lcfgrad
