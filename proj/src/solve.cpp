#include "lcfgrad/solve.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include "lcfgrad/errors.hpp"

namespace lcfgrad {

NodalField solve(const SparseSymMatrix& sys, const NodalField& rhs,
                 const SolverOptions& opts) {
  const Eigen::Map<const Eigen::VectorXd> b(rhs.data(), rhs.size());
  Eigen::VectorXd x;

  if (opts.method == SolverOptions::Method::Direct) {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
    ldlt.compute(sys.mat);
    if (ldlt.info() != Eigen::Success)
      throw SingularSystem("sparse Cholesky factorization failed");
    x = ldlt.solve(b);
  } else {
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>,
                             Eigen::Lower | Eigen::Upper,
                             Eigen::DiagonalPreconditioner<double>>
        cg;
    cg.setTolerance(opts.tol);
    cg.setMaxIterations(opts.max_iterations);
    cg.compute(sys.mat);
    x = cg.solve(b);
    if (cg.info() != Eigen::Success)
      throw NoConvergence("CG stopped after " + std::to_string(cg.iterations()) +
                          " iterations, error " + std::to_string(cg.error()));
  }

  const double bnorm = b.norm();
  const double resid = (sys.mat * x - b).norm();
  if (!x.allFinite() || (bnorm > 0 && resid > std::max(opts.tol, 1e-9) * bnorm))
    throw SingularSystem("residual " + std::to_string(resid) + " for |F| " +
                         std::to_string(bnorm) + " (unconstrained rigid modes?)");

  NodalField out(rhs.rows(), 3);
  Eigen::Map<Eigen::VectorXd>(out.data(), out.size()) = x;
  return out;
}

}  // namespace lcfgrad
