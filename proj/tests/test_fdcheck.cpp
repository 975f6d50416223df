#include <doctest.h>

#include <random>

#include "lcfgrad/errors.hpp"
#include "lcfgrad/fdcheck.hpp"
#include "lcfgrad/surrogate.hpp"

using namespace lcfgrad;

namespace {

const ElasticMaterial kElastic{70000.0, 0.3, 2.65e-9};
const LcfMaterial kLcf{443.9, 0.064, 2536.0, 0.254, -0.593, -0.07, 2.0, 1.0};

double dot(const NodalField& a, const NodalField& b) { return a.cwiseProduct(b).sum(); }

}  // namespace

TEST_CASE("fd_directional: quadratic functional is differentiated exactly") {
  const Mesh m = box_mesh(ElementKind::Hex8, 2, 1, 1, {2, 1, 1});
  auto j = [](const NodalField& X) { return X.squaredNorm(); };
  std::mt19937 rng(3);
  std::normal_distribution<double> gauss;
  NodalField V(m.n_nodes(), 3);
  for (int i = 0; i < V.size(); ++i) V(i / 3, i % 3) = gauss(rng);

  const double analytic = dot(NodalField(2.0 * m.nodes), V);
  const std::vector<double> eps = {1e-4};
  const FdReport central = fd_directional("quad", j, m.nodes, V, analytic, eps);
  CHECK(central.best_rel_error <= 1e-10);  // central differences: exact for quadratics
  CHECK(central.best_eps == 1e-4);

  const FdReport fwd =
      fd_directional("quad_fwd", j, m.nodes, V, analytic, eps, FdScheme::Forward);
  // forward quotient carries the first-order term eps * |V|^2
  CHECK(fwd.fd_value[0] == doctest::Approx(analytic + 1e-4 * V.squaredNorm()).epsilon(1e-10));
}

TEST_CASE("fd_directional: inverted-element steps are recorded and skipped") {
  const Mesh m = box_mesh(ElementKind::Hex8, 1, 1, 1, {1, 1, 1});
  auto j = [&](const NodalField& X) {
    Mesh mp = m;
    mp.nodes = X;
    double det_sum = 0;
    const VolumeRule rule = mp.ref().volume_rule();
    for (int l = 0; l < rule.weights.size(); ++l) {
      const Eigen::Vector3d xi = rule.points.row(l);
      det_sum += jacobian(mp, 0, xi).determinant();
    }
    return det_sum;
  };
  // collapse the element along z for steps beyond eps = 1
  NodalField V = NodalField::Zero(m.n_nodes(), 3);
  for (int i = 0; i < m.n_nodes(); ++i)
    if (m.nodes(i, 2) > 0.5) V(i, 2) = -1.0;
  const std::vector<double> eps = {2.0, 0.5, 1e-3};
  const FdReport r = fd_directional("inv", j, m.nodes, V, 0.0, eps);
  CHECK(!r.valid[0]);  // X - 2 V raises the element through itself
  CHECK(r.valid[1]);
  CHECK(r.valid[2]);
}

TEST_CASE("stable error rejects a lucky cancellation") {
  const Mesh m = box_mesh(ElementKind::Hex8, 1, 1, 1, {1, 1, 1});
  auto j = [](const NodalField& X) { return X.squaredNorm(); };
  NodalField V = NodalField::Ones(m.n_nodes(), 3);

  // claim a wrong analytic value; the forward-difference curve crosses it at
  // one eps and is far off elsewhere
  const double truth = dot(NodalField(2.0 * m.nodes), V);
  const double wrong = truth + 0.01 * V.squaredNorm();  // crossed at eps = 0.01
  const FdReport r = fd_directional("lucky", j, m.nodes, V, wrong,
                                    default_eps_grid(1.0), FdScheme::Forward);
  CHECK(r.best_rel_error <= 1e-10);      // the lucky dip
  CHECK(r.stable_rel_error >= 1e-5);     // but no adjacent pair confirms it
  CHECK(!r.passes(1e-3));

  // with the correct analytic value the pass is certified
  const FdReport ok = fd_directional("ok", j, m.nodes, V, truth,
                                     default_eps_grid(1.0), FdScheme::Central);
  CHECK(ok.passes(1e-8));
}

TEST_CASE("validation suite covers every adjoint ingredient and passes") {
  const Mesh rod = bent_rod_mesh(ElementKind::Hex8, 5, 2, 2);
  LoadCase load;
  load.volume = LoadCase::Centrifugal{2000.0, 2.65e-9};
  load.traction = LoadCase::ForceControlled{{18.85, 0, 0}};
  const SuiteResult res = run_validation_suite(rod, kElastic, kLcf, load);
  CHECK(res.passed);

  // one registered oracle per ingredient (several directions each)
  for (const std::string prefix :
       {"dJ_dU:", "dJ_dX:", "lam_dB_dX_u:", "lam_dF_dX:", "total:"}) {
    int found = 0;
    for (const FdReport& r : res.reports)
      if (r.name.rfind(prefix, 0) == 0) ++found;
    CHECK(found >= 2);
  }
  // thresholds hold with margin on the surrogate
  for (const FdReport& r : res.reports) {
    CAPTURE(r.name);
    CHECK(r.plateau);
    CHECK(r.best_rel_error <= 2e-3);
  }
}

TEST_CASE("validation suite is reproducible for a fixed seed") {
  const Mesh rod = bent_rod_mesh(ElementKind::Hex8, 4, 2, 2);
  LoadCase load;
  load.traction = LoadCase::FixedTraction{{12.0, 0, 0}};
  const SuiteResult a = run_validation_suite(rod, kElastic, kLcf, load);
  const SuiteResult b = run_validation_suite(rod, kElastic, kLcf, load);
  REQUIRE(a.reports.size() == b.reports.size());
  for (size_t i = 0; i < a.reports.size(); ++i) {
    CHECK(a.reports[i].analytic == b.reports[i].analytic);
    CHECK(a.reports[i].fd_value == b.reports[i].fd_value);
  }
}
