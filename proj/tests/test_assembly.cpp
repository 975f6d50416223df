#include <doctest.h>

#include <random>

#include "lcfgrad/assembly.hpp"
#include "lcfgrad/errors.hpp"
#include "lcfgrad/life.hpp"
#include "lcfgrad/solve.hpp"
#include "lcfgrad/surrogate.hpp"

using namespace lcfgrad;

namespace {

const ElasticMaterial kSteelLike{70000.0, 0.3, 2.65e-9};

NodalField rigid_translation(int n, const Eigen::Vector3d& t) {
  NodalField v(n, 3);
  v.rowwise() = t.transpose();
  return v;
}

NodalField linearized_rotation(const Mesh& m, const Eigen::Vector3d& w) {
  NodalField v(m.n_nodes(), 3);
  for (int i = 0; i < m.n_nodes(); ++i)
    v.row(i) = w.cross(Eigen::Vector3d(m.nodes.row(i))).transpose();
  return v;
}

Eigen::VectorXd flat(const NodalField& f) {
  return Eigen::Map<const Eigen::VectorXd>(f.data(), f.size());
}

Mesh distorted_cube(ElementKind kind) {
  Mesh m = box_mesh(kind, 2, 2, 2, {1, 1, 1}, false, false);
  // move the interior node off-center so the patch test is non-trivial
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> un(-0.08, 0.08);
  for (int j = 0; j < m.n_nodes(); ++j) {
    const Eigen::Vector3d p = m.nodes.row(j);
    const bool interior = p.x() > 1e-9 && p.x() < 1 - 1e-9 && p.y() > 1e-9 &&
                          p.y() < 1 - 1e-9 && p.z() > 1e-9 && p.z() < 1 - 1e-9;
    if (interior)
      for (int d = 0; d < 3; ++d) m.nodes(j, d) += un(rng);
  }
  return m;
}

}  // namespace

TEST_CASE("stiffness: exact symmetry and rigid-body kernel") {
  for (ElementKind kind : {ElementKind::Tet4, ElementKind::Hex8, ElementKind::Hex20}) {
    const Mesh m = bent_rod_mesh(kind, 4, 2, 2);
    const SparseSymMatrix B = assemble_stiffness(m, kSteelLike);
    const double bnorm = B.norm_inf();
    CHECK(B.asymmetry() <= 1e-10 * bnorm);

    const NodalField t = rigid_translation(m.n_nodes(), {1.0, -2.0, 0.5});
    CHECK((B.mat * flat(t)).lpNorm<Eigen::Infinity>() <=
          1e-9 * bnorm * t.cwiseAbs().maxCoeff());
    const NodalField r = linearized_rotation(m, {0.3, -1.0, 0.7});
    CHECK((B.mat * flat(r)).lpNorm<Eigen::Infinity>() <=
          1e-9 * bnorm * r.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("patch test: prescribed end displacement gives a homogeneous state") {
  for (ElementKind kind : {ElementKind::Tet4, ElementKind::Hex8, ElementKind::Hex20}) {
    const Mesh m = distorted_cube(kind);
    const double strain = 1e-3;
    SparseSymMatrix B = assemble_stiffness(m, kSteelLike);
    NodalField rhs = NodalField::Zero(m.n_nodes(), 3);

    // u_x = 0 at x=0, u_x = strain at x=1, symmetry planes at y=0 and z=0.
    std::vector<std::pair<int, double>> constraints;
    for (int j = 0; j < m.n_nodes(); ++j) {
      const Eigen::Vector3d p = m.nodes.row(j);
      if (std::abs(p.x()) < 1e-9) constraints.push_back({3 * j, 0.0});
      if (std::abs(p.x() - 1) < 1e-9) constraints.push_back({3 * j, strain});
      if (std::abs(p.y()) < 1e-9) constraints.push_back({3 * j + 1, 0.0});
      if (std::abs(p.z()) < 1e-9) constraints.push_back({3 * j + 2, 0.0});
    }
    constrain_dofs(B, rhs, constraints);
    const NodalField U = solve(B, rhs);

    const double E = kSteelLike.youngs_modulus;
    const double nu = kSteelLike.poisson_ratio;
    for (const Eigen::Vector3d xi :
         {Eigen::Vector3d(0.1, 0.1, 0.1), Eigen::Vector3d(0.2, 0.05, 0.15)}) {
      const Eigen::Matrix3d sig = stress_at(m, kSteelLike, U, 0, xi);
      CHECK(sig(0, 0) == doctest::Approx(E * strain).epsilon(1e-8));
      CHECK(std::abs(sig(1, 1)) <= 1e-8 * E * strain);
      CHECK(std::abs(sig(2, 2)) <= 1e-8 * E * strain);
    }
    // lateral contraction is free: a node at y=1 moved by -nu*strain
    int top = -1;
    for (int j = 0; j < m.n_nodes(); ++j)
      if (std::abs(m.nodes(j, 1) - 1) < 1e-9 && top < 0) top = j;
    CHECK(U(top, 1) == doctest::Approx(-nu * strain).epsilon(1e-7));
  }
}

TEST_CASE("assemble_load: zero, constant traction, force-controlled density") {
  const Mesh m = box_mesh(ElementKind::Hex8, 1, 1, 1, {1, 1, 1});
  CHECK(assemble_load(m, LoadCase{}).norm() == 0.0);

  // constant traction on the unit x=1 face sums to exactly g (partition of unity)
  LoadCase fixed;
  const Eigen::Vector3d g(12.0, 3.0, -4.0);
  fixed.traction = LoadCase::FixedTraction{g};
  const NodalField F = assemble_load(m, fixed);
  CHECK((F.colwise().sum().transpose() - g).norm() < 1e-12 * g.norm());

  // paper's rod load: 18.85 N over 1.57 mm^2 means 12 N/mm^2
  const Mesh m2 = box_mesh(ElementKind::Hex8, 1, 1, 1, {1.0, 1.57, 1.0});
  CHECK(traction_area(m2) == doctest::Approx(1.57).epsilon(1e-12));
  LoadCase fc;
  fc.traction = LoadCase::ForceControlled{Eigen::Vector3d(18.85, 0, 0)};
  const NodalField F2 = assemble_load(m2, fc);
  const double implied_density = F2.col(0).sum() / 1.57;
  CHECK(implied_density == doctest::Approx(12.0).epsilon(1e-3));
  CHECK(F2.col(0).sum() == doctest::Approx(18.85).epsilon(1e-12));
}

TEST_CASE("assemble_load: force-controlled traction without loaded faces") {
  Mesh m = box_mesh(ElementKind::Hex8, 1, 1, 1, {1, 1, 1}, true, false);
  LoadCase fc;
  fc.traction = LoadCase::ForceControlled{Eigen::Vector3d(1, 0, 0)};
  CHECK_THROWS_AS(assemble_load(m, fc), ZeroArea);
}

TEST_CASE("assemble_load: centrifugal force density is rho omega^2 (0,y,z)") {
  // box [0,1]^3 about the x axis: total F_y = rho w^2 * integral of y = rho w^2 / 2
  const Mesh m = box_mesh(ElementKind::Hex8, 2, 2, 2, {1, 1, 1});
  LoadCase cf;
  const double rho = 2.65e-9, omega = 11519.17;
  cf.volume = LoadCase::Centrifugal{omega, rho};
  const NodalField F = assemble_load(m, cf);
  const double expect = rho * omega * omega * 0.5;
  CHECK(F.col(0).sum() == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(F.col(1).sum() == doctest::Approx(expect).epsilon(1e-10));
  CHECK(F.col(2).sum() == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("centrifugal ring load: zero axial component, radial by symmetry") {
  const Mesh ring = ring_mesh(ElementKind::Hex8, 2, 2, 28, 4.0, 8.0, 2.0);
  LoadCase cf;
  cf.volume = LoadCase::Centrifugal{1000.0, 2.65e-9};
  const NodalField F = assemble_load(ring, cf);
  const double scale = F.cwiseAbs().maxCoeff();
  CHECK(std::abs(F.col(0).sum()) <= 1e-10 * scale);  // axial exactly zero
  CHECK(std::abs(F.col(1).sum()) <= 1e-9 * scale * ring.n_nodes());
  CHECK(std::abs(F.col(2).sum()) <= 1e-9 * scale * ring.n_nodes());
}

TEST_CASE("centrifugal load at 110000 rpm matches a hand quadrature of moment arms") {
  // rotor-like surrogate at the reference speed: ω = 2π · 1833.33 rad/s
  const double omega = 2.0 * std::numbers::pi * 110000.0 / 60.0;
  const double rho = 2.65e-9;
  const Mesh ring = ring_mesh(ElementKind::Hex8, 2, 2, 21, 10.0, 40.0, 8.0);
  LoadCase cf;
  cf.volume = LoadCase::Centrifugal{omega, rho};
  const NodalField F = assemble_load(ring, cf);

  // hand check: recompute every nodal load with a plain serial loop over
  // elements and quadrature points, ρ ω² (0, ξ2, ξ3) at the mapped positions
  const VolumeRule rule = ring.ref().volume_rule();
  NodalField hand = NodalField::Zero(ring.n_nodes(), 3);
  for (int e = 0; e < ring.n_elements(); ++e) {
    const auto X = ring.element_coords(e);
    const auto en = ring.element_nodes(e);
    for (int l = 0; l < rule.weights.size(); ++l) {
      const Eigen::Matrix3d J = X.transpose() * rule.grad[l];
      const Eigen::Vector3d x = X.transpose() * rule.shape.row(l).transpose();
      const Eigen::Vector3d f = rho * omega * omega * Eigen::Vector3d(0, x.y(), x.z());
      for (size_t a = 0; a < en.size(); ++a)
        hand.row(en[a]) +=
            rule.weights(l) * J.determinant() * rule.shape(l, static_cast<int>(a)) *
            f.transpose();
    }
  }
  REQUIRE(hand.norm() > 0);
  CHECK(std::abs(F.norm() - hand.norm()) <= 1e-8 * hand.norm());
  CHECK((F - hand).norm() <= 1e-8 * hand.norm());
  // axial components vanish identically at this speed too
  CHECK(F.col(0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("apply_dirichlet: full clamp, floating structure, reaction balance") {
  const Mesh m = box_mesh(ElementKind::Hex8, 1, 1, 1, {1, 1, 1});
  LoadCase load;
  load.traction = LoadCase::FixedTraction{{5.0, 0, 0}};

  SUBCASE("constraining all nodes gives the zero solution") {
    SparseSymMatrix B = assemble_stiffness(m, kSteelLike);
    NodalField F = assemble_load(m, load);
    std::vector<int> all(m.n_nodes());
    for (int i = 0; i < m.n_nodes(); ++i) all[i] = i;
    apply_dirichlet(B, F, all);
    CHECK(solve(B, F).norm() == 0.0);
  }

  SUBCASE("no constraints with a nonzero load is singular") {
    SparseSymMatrix B = assemble_stiffness(m, kSteelLike);
    NodalField F = assemble_load(m, load);
    CHECK_THROWS_AS(solve(B, F), SingularSystem);
  }

  SUBCASE("reactions at the clamped face balance the applied load") {
    const Mesh rod = box_mesh(ElementKind::Hex8, 3, 1, 1, {3, 1, 1});
    SparseSymMatrix B = assemble_stiffness(rod, kSteelLike);
    const NodalField F_raw = assemble_load(rod, load);
    NodalField F = F_raw;
    apply_dirichlet(B, F, rod.dirichlet_nodes);
    const NodalField U = solve(B, F);
    const SparseSymMatrix raw = assemble_stiffness(rod, kSteelLike);
    const Eigen::VectorXd r = raw.mat * flat(U);
    Eigen::Vector3d reaction = Eigen::Vector3d::Zero();
    for (int j : rod.dirichlet_nodes)
      for (int d = 0; d < 3; ++d) reaction(d) += r(3 * j + d) - F_raw(j, d);
    const Eigen::Vector3d applied(5.0 * 1.0, 0, 0);  // g * area
    CHECK((reaction + applied).norm() <= 1e-9 * applied.norm());
  }
}

TEST_CASE("work balance and coercivity proxy") {
  const Mesh rod = bent_rod_mesh(ElementKind::Hex8, 6, 2, 2);
  LoadCase load;
  load.traction = LoadCase::ForceControlled{{18.85, 0, 0}};
  SparseSymMatrix B = assemble_stiffness(rod, kSteelLike);
  NodalField F = assemble_load(rod, load);
  apply_dirichlet(B, F, rod.dirichlet_nodes);
  const NodalField U = solve(B, F);
  const double uf = flat(U).dot(flat(F));
  const double ubu = flat(U).dot(B.mat * flat(U));
  CHECK(uf == doctest::Approx(ubu).epsilon(1e-9));

  std::mt19937 rng(17);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd v(B.n());
    for (int i = 0; i < v.size(); ++i) v(i) = gauss(rng);
    for (int d = 0; d < B.n(); ++d)
      if (B.is_constrained(d)) v(d) = 0;
    if (v.norm() == 0) continue;
    CHECK(v.dot(B.mat * v) > 0);
  }
}

TEST_CASE("assembly is bitwise deterministic across thread counts") {
  const Mesh rod = bent_rod_mesh(ElementKind::Hex8, 6, 2, 2);
  LoadCase load;
  load.volume = LoadCase::Centrifugal{5000.0, 2.65e-9};
  load.traction = LoadCase::ForceControlled{{18.85, 0, 0}};
  const SparseSymMatrix B1 = assemble_stiffness(rod, kSteelLike, {}, 1);
  const NodalField F1 = assemble_load(rod, load, {}, 1);
  for (int threads : {4, 12}) {
    const SparseSymMatrix Bt = assemble_stiffness(rod, kSteelLike, {}, threads);
    REQUIRE(Bt.mat.nonZeros() == B1.mat.nonZeros());
    const Eigen::Map<const Eigen::VectorXd> a(B1.mat.valuePtr(), B1.mat.nonZeros());
    const Eigen::Map<const Eigen::VectorXd> b(Bt.mat.valuePtr(), Bt.mat.nonZeros());
    CHECK((a - b).lpNorm<Eigen::Infinity>() == 0.0);
    const NodalField Ft = assemble_load(rod, load, {}, threads);
    CHECK((flat(F1) - flat(Ft)).lpNorm<Eigen::Infinity>() == 0.0);
  }
}

TEST_CASE("assembly propagates DegenerateElement") {
  Mesh m = box_mesh(ElementKind::Hex8, 1, 1, 1, {1, 1, 1});
  for (int j = 0; j < m.n_nodes(); ++j) m.nodes(j, 2) = 0.0;
  CHECK_THROWS_AS(assemble_stiffness(m, kSteelLike), DegenerateElement);
}
