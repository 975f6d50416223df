#include "lcfgrad/adjoint.hpp"

#include <cmath>

#include "lcfgrad/errors.hpp"
#include "lcfgrad/parallel.hpp"

namespace lcfgrad {

NodalField assemble_nodal(const Mesh& mesh, const LocalGradientBatch& batch) {
  NodalField out = NodalField::Zero(mesh.n_nodes(), 3);
  for (size_t i = 0; i < batch.element.size(); ++i) {
    const auto en = mesh.element_nodes(batch.element[i]);
    const Eigen::Matrix3Xd& v = batch.values[i];
    for (int k = 0; k < v.cols(); ++k) out.row(en[k]) += v.col(k).transpose();
  }
  return out;
}

namespace {

// Shared per-quadrature-point state of the surface objective and its
// derivatives. q = ∇u(ξ_l^F), A = q + q^T - (2/3)tr(q)I, s = σ_a²/E.
struct FacePointState {
  Eigen::Matrix<double, 3, 2> JF;
  Eigen::Matrix2d g_inv;
  double sqrt_detg = 0;
  Eigen::Matrix<double, Eigen::Dynamic, 3> G;  // physical shape gradients
  Eigen::Matrix3d q;
  double s = 0;

  void compute(const Mesh& mesh, const NodalField& U, const FaceRef& f,
               const FaceRule& fr, int l, double mu, double E) {
    const auto X = mesh.element_coords(f.element);
    const auto en = mesh.element_nodes(f.element);
    const double L = mesh.element_char_length(f.element);
    JF = X.transpose() * fr.face_grad[l];
    const Eigen::Matrix2d gram = JF.transpose() * JF;
    const double detg = gram.determinant();
    if (detg <= 0) throw DegenerateFace("face Gram determinant <= 0");
    sqrt_detg = std::sqrt(detg);
    g_inv = gram.inverse();
    const Eigen::Matrix3d J = X.transpose() * fr.grad[l];
    if (J.determinant() < 1e-12 * L * L * L)
      throw DegenerateElement("surface element inverted");
    G = fr.grad[l] * J.inverse();
    q.setZero();
    for (int m = 0; m < G.rows(); ++m) q += U.row(en[m]).transpose() * G.row(m);
    const Eigen::Matrix3d A =
        q + q.transpose() - (2.0 / 3.0) * q.trace() * Eigen::Matrix3d::Identity();
    s = 3.0 * mu * mu / (8.0 * E) * A.squaredNorm();
  }

  // ds/dq = (3μ²/4E)(A + A^T - (2/3)tr(A) I) = (3μ²/2E) A  (A symmetric, trace-free)
  Eigen::Matrix3d ds_dq(double mu, double E) const {
    const Eigen::Matrix3d A =
        q + q.transpose() - (2.0 / 3.0) * q.trace() * Eigen::Matrix3d::Identity();
    return 3.0 * mu * mu / (2.0 * E) * A;
  }
};

LocalGradientBatch objective_local_gradients(const Mesh& mesh,
                                             const ElasticMaterial& elastic,
                                             const LcfMaterial& lcf, const NodalField& U,
                                             const QuadratureConfig& quad, int threads,
                                             bool wrt_x) {
  const LifeCurve curve(elastic, lcf);
  const auto& re = mesh.ref();
  const auto rules = re.all_face_rules(quad);
  const double mu = elastic.lame_mu();
  const double E = elastic.youngs_modulus;
  const int nsh = re.n_sh;
  const int nfc = static_cast<int>(mesh.surface_faces.size());

  LocalGradientBatch batch;
  batch.element.resize(nfc);
  batch.values.assign(nfc, Eigen::Matrix3Xd());

  parallel_for(nfc, threads, [&](int i) {
    const FaceRef f = mesh.surface_faces[i];
    const FaceRule& fr = rules[f.face];
    Eigen::Matrix3Xd val = Eigen::Matrix3Xd::Zero(3, nsh);
    FacePointState st;
    for (int l = 0; l < fr.weights.size(); ++l) {
      st.compute(mesh, U, f, fr, l, mu, E);
      const auto ce = curve.chain(st.s);
      const double w_lF = fr.weights(l) * st.sqrt_detg;
      if (!wrt_x) {
        if (ce.dw_ds == 0) continue;
        const Eigen::Matrix3d dsdq = st.ds_dq(mu, E);
        for (int m = 0; m < nsh; ++m)
          val.col(m) += w_lF * ce.dw_ds * (dsdq * st.G.row(m).transpose());
      } else {
        // ∂ω_lF/∂X_m = ω̂_l sqrt(det g) J_F g^{-1} ∇^F θ_m  (Gram-determinant rule)
        const Eigen::Matrix<double, 3, 2> W = st.JF * st.g_inv;
        for (int m = 0; m < nsh; ++m) {
          const Eigen::Vector2d fgm = fr.face_grad[l].row(m);
          val.col(m) += fr.weights(l) * st.sqrt_detg * ce.w * (W * fgm);
        }
        if (ce.dw_ds != 0) {
          // ∂q/∂X_mi = -q[:,i] ⊗ ∇θ_m  ⇒  ds/dX_m = -q^T (ds/dq ∇θ_m)
          const Eigen::Matrix3d dsdq = st.ds_dq(mu, E);
          for (int m = 0; m < nsh; ++m) {
            const Eigen::Vector3d v = dsdq * st.G.row(m).transpose();
            val.col(m) -= w_lF * ce.dw_ds * (st.q.transpose() * v);
          }
        }
      }
    }
    batch.element[i] = f.element;
    batch.values[i] = std::move(val);
  });
  return batch;
}

}  // namespace

LocalGradientBatch objective_du_local(const Mesh& mesh, const ElasticMaterial& elastic,
                                      const LcfMaterial& lcf, const NodalField& U,
                                      const QuadratureConfig& quad, int threads) {
  return objective_local_gradients(mesh, elastic, lcf, U, quad, threads, false);
}

LocalGradientBatch objective_dx_local(const Mesh& mesh, const ElasticMaterial& elastic,
                                      const LcfMaterial& lcf, const NodalField& U,
                                      const QuadratureConfig& quad, int threads) {
  return objective_local_gradients(mesh, elastic, lcf, U, quad, threads, true);
}

NodalField adjoint_solve(const SparseSymMatrix& sys, const NodalField& dj_du,
                         const SolverOptions& opts) {
  NodalField rhs = dj_du;
  constrain_rhs(sys, rhs);
  return solve(sys, rhs, opts);
}

NodalField stiffness_shape_contraction(const Mesh& mesh, const ElasticMaterial& mat,
                                       const NodalField& U, const NodalField& lambda,
                                       const QuadratureConfig& quad, int threads) {
  mat.check();
  const auto& re = mesh.ref();
  const VolumeRule rule = re.volume_rule(quad);
  const int nsh = re.n_sh;
  const int nel = mesh.n_elements();
  const double lam = mat.lame_lambda();
  const double mu = mat.lame_mu();

  LocalGradientBatch batch;
  batch.element.resize(nel);
  batch.values.assign(nel, Eigen::Matrix3Xd());

  parallel_for(nel, threads, [&](int e) {
    const auto X = mesh.element_coords(e);
    const auto en = mesh.element_nodes(e);
    const double L = mesh.element_char_length(e);
    Eigen::Matrix3Xd val = Eigen::Matrix3Xd::Zero(3, nsh);
    for (int l = 0; l < rule.weights.size(); ++l) {
      const Eigen::Matrix3d J = X.transpose() * rule.grad[l];
      const double det = J.determinant();
      if (det < 1e-12 * L * L * L) throw DegenerateElement("element inverted");
      const Eigen::Matrix<double, Eigen::Dynamic, 3> G = rule.grad[l] * J.inverse();
      const double w = rule.weights(l) * det;

      Eigen::Matrix3d p = Eigen::Matrix3d::Zero();  // ∇λ
      Eigen::Matrix3d q = Eigen::Matrix3d::Zero();  // ∇u
      for (int m = 0; m < nsh; ++m) {
        p += lambda.row(en[m]).transpose() * G.row(m);
        q += U.row(en[m]).transpose() * G.row(m);
      }
      const Eigen::Matrix3d ps = p + p.transpose();
      const Eigen::Matrix3d qs = q + q.transpose();
      // S = λ divλ divu + 2μ ε(λ):ε(u); the three derivative terms of
      // (dB_1_dX)/(dB_2_dX) collapse to ω (S I - H) ∇θ_m with
      // H = λ(tr q · p^T + tr p · q^T) + μ(p^T (q+q^T) + q^T (p+p^T)),
      // using ∂ω/∂X_m = ω ∇θ_m and ∂∇θ_r/∂X_mi = -(∇θ_r)_i ∇θ_m.
      const double S = lam * p.trace() * q.trace() + 0.5 * mu * ps.cwiseProduct(qs).sum();
      const Eigen::Matrix3d H = lam * (q.trace() * p.transpose() + p.trace() * q.transpose()) +
                                mu * (p.transpose() * qs + q.transpose() * ps);
      const Eigen::Matrix3d Z = S * Eigen::Matrix3d::Identity() - H;
      for (int m = 0; m < nsh; ++m) val.col(m) += w * (Z * G.row(m).transpose());
    }
    batch.element[e] = e;
    batch.values[e] = std::move(val);
  });
  return assemble_nodal(mesh, batch);
}

NodalField volume_load_shape_contraction(const Mesh& mesh, const LoadCase& load,
                                         const NodalField& lambda,
                                         const QuadratureConfig& quad, int threads) {
  const auto& re = mesh.ref();
  const int nsh = re.n_sh;
  NodalField out = NodalField::Zero(mesh.n_nodes(), 3);
  if (!load.has_volume()) return out;
  const VolumeRule rule = re.volume_rule(quad);
  const int nel = mesh.n_elements();
  const auto* cent = std::get_if<LoadCase::Centrifugal>(&load.volume);
  const auto* cons = std::get_if<LoadCase::ConstantBody>(&load.volume);

  LocalGradientBatch batch;
  batch.element.resize(nel);
  batch.values.assign(nel, Eigen::Matrix3Xd());

  parallel_for(nel, threads, [&](int e) {
    const auto X = mesh.element_coords(e);
    const auto en = mesh.element_nodes(e);
    const double L = mesh.element_char_length(e);
    Eigen::Matrix3Xd val = Eigen::Matrix3Xd::Zero(3, nsh);
    for (int l = 0; l < rule.weights.size(); ++l) {
      const Eigen::Matrix3d J = X.transpose() * rule.grad[l];
      const double det = J.determinant();
      if (det < 1e-12 * L * L * L) throw DegenerateElement("element inverted");
      const Eigen::Matrix<double, Eigen::Dynamic, 3> G = rule.grad[l] * J.inverse();
      const double w = rule.weights(l) * det;

      const Eigen::Vector3d x = X.transpose() * rule.shape.row(l).transpose();
      Eigen::Vector3d f = Eigen::Vector3d::Zero();
      if (cons) f = cons->force_density;
      if (cent) f = cent->density * cent->omega * cent->omega * Eigen::Vector3d(0, x.y(), x.z());

      Eigen::Vector3d lam_at = Eigen::Vector3d::Zero();  // Σ_q Λ_q θ_q(ξ_l)
      for (int m = 0; m < nsh; ++m) lam_at += rule.shape(l, m) * lambda.row(en[m]).transpose();

      const double f_dot_lam = f.dot(lam_at);
      for (int m = 0; m < nsh; ++m) {
        // ∂ω_lK/∂X_m = ω ∇θ_m
        val.col(m) += w * f_dot_lam * G.row(m).transpose();
        if (cent) {
          // ∂f/∂X_mi = ρω² θ̂_m e_i for i = 2,3 and 0 for the axis component
          const double cfac = w * cent->density * cent->omega * cent->omega * rule.shape(l, m);
          val(1, m) += cfac * lam_at.y();
          val(2, m) += cfac * lam_at.z();
        }
      }
    }
    batch.element[e] = e;
    batch.values[e] = std::move(val);
  });
  return assemble_nodal(mesh, batch);
}

NodalField surface_load_shape_contraction(const Mesh& mesh, const LoadCase& load,
                                          const NodalField& lambda,
                                          const QuadratureConfig& quad, int threads) {
  const auto& re = mesh.ref();
  const int nsh = re.n_sh;
  NodalField out = NodalField::Zero(mesh.n_nodes(), 3);
  if (!load.has_traction()) return out;
  const auto rules = re.all_face_rules(quad);
  const auto* fc = std::get_if<LoadCase::ForceControlled>(&load.traction);

  Eigen::Vector3d g = Eigen::Vector3d::Zero();
  double area = 0;
  if (fc) {
    area = traction_area(mesh, quad);
    if (!(area > 0)) throw ZeroArea("force-controlled traction with zero loaded area");
    g = fc->total_force / area;
  } else {
    g = std::get<LoadCase::FixedTraction>(load.traction).density;
  }

  const int nfc = static_cast<int>(mesh.traction_faces.size());
  LocalGradientBatch batch;  // ∂ω_lF/∂X · (g·λ̄) per point
  batch.element.resize(nfc);
  batch.values.assign(nfc, Eigen::Matrix3Xd());
  LocalGradientBatch domega;  // Σ_l ∂ω_lF/∂X, the ∂A/∂X pieces
  domega.element.resize(nfc);
  domega.values.assign(nfc, Eigen::Matrix3Xd());
  std::vector<double> w_dot(nfc, 0.0);  // Σ_l ω_lF g·λ̄ per face

  parallel_for(nfc, threads, [&](int i) {
    const FaceRef f = mesh.traction_faces[i];
    const auto X = mesh.element_coords(f.element);
    const auto en = mesh.element_nodes(f.element);
    const FaceRule& fr = rules[f.face];
    Eigen::Matrix3Xd val = Eigen::Matrix3Xd::Zero(3, nsh);
    Eigen::Matrix3Xd dw = Eigen::Matrix3Xd::Zero(3, nsh);
    double wd = 0;
    for (int l = 0; l < fr.weights.size(); ++l) {
      const Eigen::Matrix<double, 3, 2> JF = X.transpose() * fr.face_grad[l];
      const Eigen::Matrix2d gram = JF.transpose() * JF;
      const double detg = gram.determinant();
      if (detg <= 0) throw DegenerateFace("traction face Gram determinant <= 0");
      const double sq = std::sqrt(detg);
      const Eigen::Matrix<double, 3, 2> W = JF * gram.inverse();
      Eigen::Vector3d lam_at = Eigen::Vector3d::Zero();
      for (int m = 0; m < nsh; ++m) lam_at += fr.shape(l, m) * lambda.row(en[m]).transpose();
      const double gl = g.dot(lam_at);
      for (int m = 0; m < nsh; ++m) {
        // ∂ω_lF/∂X_m = ω̂_l sqrt(det g) J_F g^{-1} ∇^F θ_m
        const Eigen::Vector3d dwm = fr.weights(l) * sq * (W * fr.face_grad[l].row(m).transpose());
        val.col(m) += gl * dwm;
        dw.col(m) += dwm;
      }
      wd += fr.weights(l) * sq * gl;
    }
    batch.element[i] = f.element;
    batch.values[i] = std::move(val);
    domega.element[i] = f.element;
    domega.values[i] = std::move(dw);
    w_dot[i] = wd;
  });
  out = assemble_nodal(mesh, batch);

  if (fc) {
    // Force-controlled correction: ∂g/∂X = -(g/A) ∂A/∂X over the loaded
    // region, contracted with Λ this is -(Λ·F_surf / A) ∂A/∂X.
    double lam_F = 0;
    for (double v : w_dot) lam_F += v;
    const NodalField dA_dX = assemble_nodal(mesh, domega);
    out -= (lam_F / area) * dA_dX;
  }
  return out;
}

NodalField surface_normals(const Mesh& mesh, const QuadratureConfig& quad) {
  const auto& re = mesh.ref();
  const auto rules = re.all_face_rules(quad);
  NodalField acc = NodalField::Zero(mesh.n_nodes(), 3);
  for (const FaceRef& f : mesh.surface_faces) {
    const auto X = mesh.element_coords(f.element);
    const auto en = mesh.element_nodes(f.element);
    const FaceRule& fr = rules[f.face];
    Eigen::Vector3d face_normal = Eigen::Vector3d::Zero();
    for (int l = 0; l < fr.weights.size(); ++l) {
      const Eigen::Matrix<double, 3, 2> JF = X.transpose() * fr.face_grad[l];
      // t1 x t2 has the area density built in and points outward (a x b
      // is outward on the reference element, T preserves orientation).
      face_normal += fr.weights(l) * JF.col(0).cross(JF.col(1));
    }
    for (int k : re.faces[f.face].nodes) acc.row(en[k]) += face_normal.transpose();
  }
  for (int j = 0; j < acc.rows(); ++j) {
    const double n = acc.row(j).norm();
    if (n > 0) acc.row(j) /= n;
  }
  return acc;
}

Eigen::VectorXd normal_project(const Mesh& mesh, const NodalField& field,
                               const QuadratureConfig& quad) {
  const auto& re = mesh.ref();
  std::vector<char> on_surface(mesh.n_nodes(), 0);
  for (const FaceRef& f : mesh.surface_faces) {
    const auto en = mesh.element_nodes(f.element);
    for (int k : re.faces[f.face].nodes) on_surface[en[k]] = 1;
  }
  const NodalField normals = surface_normals(mesh, quad);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(mesh.n_nodes());
  for (int j = 0; j < mesh.n_nodes(); ++j) {
    if (!on_surface[j]) continue;
    if (normals.row(j).norm() == 0)
      throw IsolatedNode("surface node " + std::to_string(j) + " has no usable normal");
    out(j) = field.row(j).dot(normals.row(j));
  }
  return out;
}

NodalField ShapeGradient::dPoF_dX(double t) const {
  const double tm = std::pow(t, m_bar);
  return (tm * std::exp(-tm * J)) * dJ_dX;
}

ShapeGradient shape_gradient(const Mesh& mesh, const ElasticMaterial& elastic,
                             const LcfMaterial& lcf, const LoadCase& load,
                             const NodalField& U, const NodalField& lambda,
                             const QuadratureConfig& quad, int threads) {
  ShapeGradient sg;
  const LifeResult life = objective_J(mesh, elastic, lcf, U, quad, threads);
  sg.J = life.J;
  sg.m_bar = life.m_bar;
  const NodalField dj_dx =
      assemble_nodal(mesh, objective_dx_local(mesh, elastic, lcf, U, quad, threads));
  const NodalField bterm =
      stiffness_shape_contraction(mesh, elastic, U, lambda, quad, threads);
  const NodalField fvol = volume_load_shape_contraction(mesh, load, lambda, quad, threads);
  const NodalField fsurf = surface_load_shape_contraction(mesh, load, lambda, quad, threads);
  sg.dJ_dX = dj_dx - bterm + fvol + fsurf;
  sg.normal_component = normal_project(mesh, sg.dJ_dX, quad);
  return sg;
}

}  // namespace lcfgrad
