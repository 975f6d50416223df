#include "lcfgrad/fdcheck.hpp"

#include <cmath>
#include <random>

#include "lcfgrad/errors.hpp"

namespace lcfgrad {

std::vector<double> default_eps_grid(double length_scale) {
  // 1e-2 .. 1e-8 at 8 points per decade: dense enough that the second-order
  // error curve produces adjacent samples within the 2x plateau window.
  std::vector<double> g;
  const int per_decade = 8;
  for (int k = 2 * per_decade; k <= 8 * per_decade; ++k)
    g.push_back(std::pow(10.0, -static_cast<double>(k) / per_decade) * length_scale);
  return g;
}

namespace {

void finish_report(FdReport& r) {
  r.best_rel_error = std::numeric_limits<double>::infinity();
  const double denom = std::max(std::abs(r.analytic), 1e-300);
  std::vector<double> err(r.eps.size(), std::numeric_limits<double>::infinity());
  for (size_t i = 0; i < r.eps.size(); ++i) {
    if (!r.valid[i]) continue;
    err[i] = std::abs(r.fd_value[i] - r.analytic) / denom;
    if (err[i] < r.best_rel_error) {
      r.best_rel_error = err[i];
      r.best_eps = r.eps[i];
    }
  }
  r.stable_rel_error = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i + 1 < err.size(); ++i) {
    if (!r.valid[i] || !r.valid[i + 1]) continue;
    const double lo = std::min(err[i], err[i + 1]);
    const double hi = std::max(err[i], err[i + 1]);
    if (hi <= 2 * lo) r.stable_rel_error = std::min(r.stable_rel_error, hi);
  }
  r.plateau = std::isfinite(r.stable_rel_error);
}

}  // namespace

FdReport fd_directional(const std::string& name,
                        const std::function<double(const NodalField&)>& j_of_x,
                        const NodalField& X, const NodalField& V, double analytic,
                        std::span<const double> eps_grid, FdScheme scheme) {
  FdReport r;
  r.name = name;
  r.analytic = analytic;
  double j0 = 0;
  if (scheme == FdScheme::Forward) j0 = j_of_x(X);
  for (double eps : eps_grid) {
    r.eps.push_back(eps);
    try {
      double fd;
      if (scheme == FdScheme::Central) {
        const double jp = j_of_x(X + eps * V);
        const double jm = j_of_x(X - eps * V);
        fd = (jp - jm) / (2 * eps);
      } else {
        fd = (j_of_x(X + eps * V) - j0) / eps;
      }
      r.fd_value.push_back(fd);
      r.valid.push_back(1);
    } catch (const DegenerateElement&) {
      r.fd_value.push_back(0);
      r.valid.push_back(0);
    } catch (const DegenerateFace&) {
      r.fd_value.push_back(0);
      r.valid.push_back(0);
    }
  }
  finish_report(r);
  return r;
}

double matrix_fd(const Mesh& mesh, const ElasticMaterial& mat, const NodalField& U,
                 const NodalField& lambda, const NodalField& V, double eps,
                 const QuadratureConfig& quad) {
  const Eigen::Map<const Eigen::VectorXd> u(U.data(), U.size());
  const Eigen::Map<const Eigen::VectorXd> lam(lambda.data(), lambda.size());
  Mesh m = mesh;
  m.nodes = mesh.nodes + eps * V;
  const Eigen::VectorXd bu_p = assemble_stiffness(m, mat, quad).mat * u;
  m.nodes = mesh.nodes - eps * V;
  const Eigen::VectorXd bu_m = assemble_stiffness(m, mat, quad).mat * u;
  return lam.dot(bu_p - bu_m) / (2 * eps);
}

namespace {

double dot(const NodalField& a, const NodalField& b) {
  return a.cwiseProduct(b).sum();
}

}  // namespace

SuiteResult run_validation_suite(const Mesh& mesh, const ElasticMaterial& elastic,
                                 const LcfMaterial& lcf, const LoadCase& load,
                                 const QuadratureConfig& quad, const SolverOptions& solver,
                                 const SuiteThresholds& thresholds, unsigned seed,
                                 int threads) {
  const int N = mesh.n_nodes();
  const std::vector<double> eps_grid = default_eps_grid(mesh.char_length());

  // State and adjoint on the nominal geometry.
  SparseSymMatrix sys = assemble_stiffness(mesh, elastic, quad, threads);
  NodalField F = assemble_load(mesh, load, quad, threads);
  apply_dirichlet(sys, F, mesh.dirichlet_nodes);
  const NodalField U = solve(sys, F, solver);
  const NodalField dj_du =
      assemble_nodal(mesh, objective_du_local(mesh, elastic, lcf, U, quad, threads));
  const NodalField lambda = adjoint_solve(sys, dj_du, solver);

  const NodalField dj_dx =
      assemble_nodal(mesh, objective_dx_local(mesh, elastic, lcf, U, quad, threads));
  const NodalField bterm = stiffness_shape_contraction(mesh, elastic, U, lambda, quad, threads);
  const NodalField fterm =
      volume_load_shape_contraction(mesh, load, lambda, quad, threads) +
      surface_load_shape_contraction(mesh, load, lambda, quad, threads);
  const ShapeGradient total = shape_gradient(mesh, elastic, lcf, load, U, lambda, quad, threads);

  // Fixed direction suite: surface normal field, V ∝ X, V ∝ U on the surface,
  // two seeded random fields.
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto random_field = [&] {
    NodalField V(N, 3);
    for (int i = 0; i < N; ++i)
      for (int d = 0; d < 3; ++d) V(i, d) = gauss(rng);
    V *= mesh.char_length() / std::max(V.norm(), 1e-300);
    return V;
  };
  const NodalField v_normal = surface_normals(mesh, quad);
  const NodalField v_scale = mesh.nodes;
  NodalField v_state = NodalField::Zero(N, 3);
  for (int j = 0; j < N; ++j)
    if (v_normal.row(j).norm() > 0) v_state.row(j) = U.row(j);
  const double ustate_norm = v_state.norm();
  if (ustate_norm > 0) v_state *= mesh.char_length() / ustate_norm;
  const NodalField v_rand1 = random_field();
  const NodalField v_rand2 = random_field();

  struct Direction {
    std::string name;
    const NodalField* v;
  };
  const std::vector<Direction> directions = {{"normal", &v_normal},
                                             {"scale_x", &v_scale},
                                             {"state_surface", &v_state},
                                             {"random1", &v_rand1},
                                             {"random2", &v_rand2}};

  SuiteResult out;
  auto record = [&](FdReport r, double threshold) {
    if (!r.passes(threshold)) out.passed = false;
    out.reports.push_back(std::move(r));
  };

  // ∂J/∂U: perturb the state, geometry fixed.
  {
    auto j_of_u = [&](const NodalField& Upert) {
      return objective_J(mesh, elastic, lcf, Upert, quad, threads).J;
    };
    // directions live in U-space and are scaled to the state's magnitude,
    // so the eps decades are used unscaled
    const std::vector<double> ueps = default_eps_grid(1.0);
    NodalField v_rand_u = v_rand1;
    const double uscale = U.cwiseAbs().maxCoeff();
    if (uscale > 0 && v_rand_u.cwiseAbs().maxCoeff() > 0)
      v_rand_u *= uscale / v_rand_u.cwiseAbs().maxCoeff();
    for (const auto& [vname, V] : std::vector<std::pair<std::string, NodalField>>{
             {"state", U}, {"random1", v_rand_u}}) {
      record(fd_directional("dJ_dU:" + vname, j_of_u, U, V, dot(dj_du, V), ueps),
             thresholds.partial);
    }
  }

  // Geometry-dependent evaluators share the perturbed-mesh machinery.
  auto with_nodes = [&](const NodalField& Xp) {
    Mesh m = mesh;
    m.nodes = Xp;
    return m;
  };
  auto j_partial = [&](const NodalField& Xp) {
    return objective_J(with_nodes(Xp), elastic, lcf, U, quad, threads).J;
  };
  auto lam_F_of_x = [&](const NodalField& Xp) {
    const Mesh m = with_nodes(Xp);
    return dot(lambda, assemble_load(m, load, quad, threads));
  };
  auto j_total = [&](const NodalField& Xp) {
    const Mesh m = with_nodes(Xp);
    SparseSymMatrix s = assemble_stiffness(m, elastic, quad, threads);
    NodalField f = assemble_load(m, load, quad, threads);
    apply_dirichlet(s, f, m.dirichlet_nodes);
    return objective_J(m, elastic, lcf, solve(s, f, solver), quad, threads).J;
  };

  record(fd_directional("dJ_dX:normal", j_partial, mesh.nodes, v_normal,
                        dot(dj_dx, v_normal), eps_grid),
         thresholds.partial);
  record(fd_directional("dJ_dX:random1", j_partial, mesh.nodes, v_rand1,
                        dot(dj_dx, v_rand1), eps_grid),
         thresholds.partial);

  // Λᵀ ∂B/∂X U against the matrix-difference oracle.
  for (const auto& d : {directions[0], directions[3]}) {
    FdReport r;
    r.name = "lam_dB_dX_u:" + d.name;
    r.analytic = dot(bterm, *d.v);
    for (double eps : eps_grid) {
      r.eps.push_back(eps);
      try {
        r.fd_value.push_back(matrix_fd(mesh, elastic, U, lambda, *d.v, eps, quad));
        r.valid.push_back(1);
      } catch (const DegenerateElement&) {
        r.fd_value.push_back(0);
        r.valid.push_back(0);
      }
    }
    finish_report(r);
    record(std::move(r), thresholds.contraction);
  }

  // Λᵀ ∂F/∂X.
  if (load.has_volume() || load.has_traction()) {
    for (const auto& d : {directions[0], directions[4]}) {
      record(fd_directional("lam_dF_dX:" + d.name, lam_F_of_x, mesh.nodes, *d.v,
                            dot(fterm, *d.v), eps_grid),
             thresholds.contraction);
    }
  }

  // Total derivative with re-solve.
  for (const auto& d : directions) {
    record(fd_directional("total:" + d.name, j_total, mesh.nodes, *d.v,
                          dot(total.dJ_dX, *d.v), eps_grid),
           thresholds.total);
  }
  return out;
}

}  // namespace lcfgrad
