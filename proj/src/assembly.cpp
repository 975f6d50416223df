#include "lcfgrad/assembly.hpp"

#include <vector>

#include "lcfgrad/errors.hpp"
#include "lcfgrad/parallel.hpp"

namespace lcfgrad {

double SparseSymMatrix::norm_inf() const {
  Eigen::VectorXd row_sum = Eigen::VectorXd::Zero(mat.rows());
  for (int k = 0; k < mat.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(mat, k); it; ++it)
      row_sum(it.row()) += std::abs(it.value());
  return row_sum.size() ? row_sum.maxCoeff() : 0.0;
}

double SparseSymMatrix::asymmetry() const {
  Eigen::SparseMatrix<double> d = Eigen::SparseMatrix<double>(mat.transpose()) - mat;
  double m = 0;
  for (int k = 0; k < d.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(d, k); it; ++it)
      m = std::max(m, std::abs(it.value()));
  return m;
}

namespace {

struct ElementGeometry {
  double det = 0;
  Eigen::Matrix<double, Eigen::Dynamic, 3> G;  // physical gradients, n_sh x 3

  // J = X^T ∇̂θ̂; physical gradients G = ∇̂θ̂ J^{-1} (rows are (∇̂T^T)^{-1}∇̂θ̂_r).
  void compute(const Eigen::Matrix<double, Eigen::Dynamic, 3>& X,
               const Eigen::Matrix<double, Eigen::Dynamic, 3>& grad_hat, double det_tol) {
    const Eigen::Matrix3d J = X.transpose() * grad_hat;
    det = J.determinant();
    if (det < det_tol) throw DegenerateElement("det " + std::to_string(det));
    G = grad_hat * J.inverse();
  }
};

}  // namespace

SparseSymMatrix assemble_stiffness(const Mesh& mesh, const ElasticMaterial& mat,
                                   const QuadratureConfig& quad, int threads) {
  mat.check();
  const auto& re = mesh.ref();
  const VolumeRule rule = re.volume_rule(quad);
  const int nsh = re.n_sh;
  const int nel = mesh.n_elements();
  const int dim = 3 * mesh.n_nodes();
  const double lam = mat.lame_lambda();
  const double mu = mat.lame_mu();

  std::vector<Eigen::MatrixXd> local(nel);
  parallel_for(nel, threads, [&](int e) {
    const auto X = mesh.element_coords(e);
    const double L = mesh.element_char_length(e);
    const double det_tol = 1e-12 * L * L * L;
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(3 * nsh, 3 * nsh);
    ElementGeometry geo;
    for (int l = 0; l < rule.weights.size(); ++l) {
      geo.compute(X, rule.grad[l], det_tol);
      const double w = rule.weights(l) * geo.det;
      for (int a = 0; a < nsh; ++a) {
        const Eigen::Vector3d Ga = geo.G.row(a);
        for (int bq = 0; bq < nsh; ++bq) {
          const Eigen::Vector3d Gb = geo.G.row(bq);
          const double dot = Ga.dot(Gb);
          for (int r = 0; r < 3; ++r)
            for (int s = 0; s < 3; ++s) {
              double v = lam * w * Ga(r) * Gb(s) + mu * w * Ga(s) * Gb(r);
              if (r == s) v += mu * w * dot;
              K(3 * a + r, 3 * bq + s) += v;
            }
        }
      }
    }
    local[e] = std::move(K);
  });

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(nel) * 3 * nsh * 3 * nsh);
  for (int e = 0; e < nel; ++e) {
    const auto en = mesh.element_nodes(e);
    for (int a = 0; a < nsh; ++a)
      for (int r = 0; r < 3; ++r)
        for (int bq = 0; bq < nsh; ++bq)
          for (int s = 0; s < 3; ++s)
            trips.emplace_back(3 * en[a] + r, 3 * en[bq] + s, local[e](3 * a + r, 3 * bq + s));
  }
  SparseSymMatrix sys;
  sys.mat.resize(dim, dim);
  sys.mat.setFromTriplets(trips.begin(), trips.end());
  return sys;
}

double traction_area(const Mesh& mesh, const QuadratureConfig& quad) {
  const auto& re = mesh.ref();
  const auto rules = re.all_face_rules(quad);
  double area = 0;
  for (const FaceRef& f : mesh.traction_faces) {
    const auto X = mesh.element_coords(f.element);
    const FaceRule& fr = rules[f.face];
    for (int l = 0; l < fr.weights.size(); ++l) {
      const Eigen::Matrix<double, 3, 2> JF = X.transpose() * fr.face_grad[l];
      const double detg = (JF.transpose() * JF).determinant();
      if (detg <= 0) throw DegenerateFace("traction face with non-positive Gram determinant");
      area += fr.weights(l) * std::sqrt(detg);
    }
  }
  return area;
}

namespace {

Eigen::Vector3d volume_force(const LoadCase& load, const Eigen::Vector3d& x) {
  if (const auto* c = std::get_if<LoadCase::ConstantBody>(&load.volume))
    return c->force_density;
  if (const auto* c = std::get_if<LoadCase::Centrifugal>(&load.volume))
    return c->density * c->omega * c->omega * Eigen::Vector3d(0, x.y(), x.z());
  return Eigen::Vector3d::Zero();
}

}  // namespace

NodalField assemble_load(const Mesh& mesh, const LoadCase& load,
                         const QuadratureConfig& quad, int threads) {
  if (const auto* c = std::get_if<LoadCase::Centrifugal>(&load.volume))
    if (!(c->density > 0))
      throw ConfigError("centrifugal load requires a positive density");
  const auto& re = mesh.ref();
  const int nsh = re.n_sh;
  NodalField F = NodalField::Zero(mesh.n_nodes(), 3);

  if (load.has_volume()) {
    const VolumeRule rule = re.volume_rule(quad);
    const int nel = mesh.n_elements();
    std::vector<Eigen::Matrix3Xd> local(nel);
    parallel_for(nel, threads, [&](int e) {
      const auto X = mesh.element_coords(e);
      const double L = mesh.element_char_length(e);
      Eigen::Matrix3Xd Floc = Eigen::Matrix3Xd::Zero(3, nsh);
      ElementGeometry geo;
      for (int l = 0; l < rule.weights.size(); ++l) {
        geo.compute(X, rule.grad[l], 1e-12 * L * L * L);
        const Eigen::Vector3d x = X.transpose() * rule.shape.row(l).transpose();
        const Eigen::Vector3d f = volume_force(load, x);
        const double w = rule.weights(l) * geo.det;
        for (int a = 0; a < nsh; ++a) Floc.col(a) += w * rule.shape(l, a) * f;
      }
      local[e] = std::move(Floc);
    });
    for (int e = 0; e < nel; ++e) {
      const auto en = mesh.element_nodes(e);
      for (int a = 0; a < nsh; ++a) F.row(en[a]) += local[e].col(a).transpose();
    }
  }

  if (load.has_traction()) {
    Eigen::Vector3d g = Eigen::Vector3d::Zero();
    if (const auto* t = std::get_if<LoadCase::FixedTraction>(&load.traction)) {
      g = t->density;
    } else if (const auto* t = std::get_if<LoadCase::ForceControlled>(&load.traction)) {
      const double area = traction_area(mesh, quad);
      if (!(area > 0)) throw ZeroArea("force-controlled traction with area " +
                                      std::to_string(area));
      g = t->total_force / area;
    }
    const auto rules = re.all_face_rules(quad);
    const int nfc = static_cast<int>(mesh.traction_faces.size());
    std::vector<Eigen::Matrix3Xd> local(nfc);
    parallel_for(nfc, threads, [&](int i) {
      const FaceRef f = mesh.traction_faces[i];
      const auto X = mesh.element_coords(f.element);
      const FaceRule& fr = rules[f.face];
      Eigen::Matrix3Xd Floc = Eigen::Matrix3Xd::Zero(3, nsh);
      for (int l = 0; l < fr.weights.size(); ++l) {
        const Eigen::Matrix<double, 3, 2> JF = X.transpose() * fr.face_grad[l];
        const double detg = (JF.transpose() * JF).determinant();
        if (detg <= 0) throw DegenerateFace("traction face Gram determinant <= 0");
        const double w = fr.weights(l) * std::sqrt(detg);
        for (int a = 0; a < nsh; ++a) Floc.col(a) += w * fr.shape(l, a) * g;
      }
      local[i] = std::move(Floc);
    });
    for (int i = 0; i < nfc; ++i) {
      const auto en = mesh.element_nodes(mesh.traction_faces[i].element);
      for (int a = 0; a < nsh; ++a) F.row(en[a]) += local[i].col(a).transpose();
    }
  }
  return F;
}

void constrain_dofs(SparseSymMatrix& sys, NodalField& rhs,
                    std::span<const std::pair<int, double>> dof_values) {
  const int dim = sys.n();
  if (sys.constrained.empty()) sys.constrained.assign(dim, 0);
  std::vector<double> value(dim, 0.0);
  for (const auto& [dof, v] : dof_values) {
    sys.constrained[dof] = 1;
    value[dof] = v;
  }
  Eigen::Map<Eigen::VectorXd> b(rhs.data(), rhs.size());

  // Move prescribed columns to the RHS, then rebuild with rows/cols cleared
  // and a unit diagonal so the operator stays symmetric positive definite.
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(sys.mat.nonZeros());
  for (int k = 0; k < sys.mat.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(sys.mat, k); it; ++it) {
      const int r = static_cast<int>(it.row());
      const int c = static_cast<int>(it.col());
      const bool rc = sys.constrained[r], cc = sys.constrained[c];
      if (!rc && !cc) {
        trips.emplace_back(r, c, it.value());
      } else if (!rc && cc) {
        b(r) -= it.value() * value[c];
      }
    }
  for (int d = 0; d < dim; ++d)
    if (sys.constrained[d]) trips.emplace_back(d, d, 1.0);
  sys.mat.setZero();
  sys.mat.setFromTriplets(trips.begin(), trips.end());
  for (int d = 0; d < dim; ++d)
    if (sys.constrained[d]) b(d) = value[d];
}

void apply_dirichlet(SparseSymMatrix& sys, NodalField& rhs, std::span<const int> nodes) {
  std::vector<std::pair<int, double>> dofs;
  dofs.reserve(nodes.size() * 3);
  for (int j : nodes)
    for (int r = 0; r < 3; ++r) dofs.emplace_back(3 * j + r, 0.0);
  constrain_dofs(sys, rhs, dofs);
}

void constrain_rhs(const SparseSymMatrix& sys, NodalField& rhs) {
  if (sys.constrained.empty()) return;
  Eigen::Map<Eigen::VectorXd> b(rhs.data(), rhs.size());
  for (int d = 0; d < sys.n(); ++d)
    if (sys.constrained[d]) b(d) = 0.0;
}

}  // namespace lcfgrad
