#include "lcfgrad/life.hpp"

#include <cmath>
#include <limits>

#include "lcfgrad/errors.hpp"
#include "lcfgrad/parallel.hpp"

namespace lcfgrad {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Bracketed Newton with bisection fallback for a strictly monotone f.
/// Brackets are grown geometrically from x0 > 0.
template <typename F, typename DF>
double invert_monotone(F f, DF df, double target, double x0, bool increasing) {
  const double sign = increasing ? 1.0 : -1.0;
  auto h = [&](double x) { return sign * (f(x) - target); };  // increasing in x

  double lo = x0, hi = x0;
  double flo = h(lo), fhi = flo;
  for (int i = 0; i < 400 && flo > 0; ++i) {
    hi = lo;
    lo *= 0.5;
    flo = h(lo);
  }
  if (flo > 0) throw NoBracket("target below the function image");
  for (int i = 0; i < 400 && fhi < 0; ++i) {
    lo = std::max(lo, hi);
    hi *= 2.0;
    fhi = h(hi);
  }
  if (fhi < 0) throw NoBracket("target above the function image");
  if (flo == 0) return lo;
  if (fhi == 0) return hi;

  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double fx = h(x);
    if (fx > 0)
      hi = x;
    else
      lo = x;
    const double d = sign * df(x);
    double next = (d != 0) ? x - fx / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-12 * std::max(std::abs(next), 1e-300)) return next;
    x = next;
  }
  throw NoConvergence("scalar inversion did not reach 1e-12 in 200 iterations");
}

}  // namespace

LifeCurve::LifeCurve(const ElasticMaterial& elastic, const LcfMaterial& lcf)
    : E_(elastic.youngs_modulus),
      K_(lcf.hardening_K),
      n_(lcf.hardening_n),
      sf_(lcf.sigma_f_prime),
      ef_(lcf.eps_f_prime),
      b_(lcf.b),
      c_(lcf.c),
      m_(lcf.m_bar) {
  elastic.check();
  lcf.check();
}

double LifeCurve::ramberg_osgood(double sigma) const {
  return sigma / E_ + std::pow(sigma / K_, 1.0 / n_);
}

double LifeCurve::ramberg_osgood_prime(double sigma) const {
  return 1.0 / E_ + std::pow(sigma / K_, 1.0 / n_ - 1.0) / (n_ * K_);
}

double LifeCurve::neuber_energy(double x) const {
  return x * x / E_ + x * std::pow(x / K_, 1.0 / n_);
}

double LifeCurve::neuber_energy_prime(double x) const {
  return 2.0 * x / E_ + (1.0 + 1.0 / n_) * std::pow(x / K_, 1.0 / n_);
}

double LifeCurve::neuber_sd(double sigma_elpl) const {
  return std::sqrt(E_ * neuber_energy(sigma_elpl));
}

double LifeCurve::neuber_energy_inverse(double s) const {
  if (s < 0) throw NoBracket("shake-down inverse of a negative value");
  if (s == 0) return 0;
  // SD(x) >= x, so the root lies in (0, sqrt(sE)].
  const double x0 = std::sqrt(s * E_);
  return invert_monotone([&](double x) { return neuber_energy(x); },
                         [&](double x) { return neuber_energy_prime(x); }, s, x0, true);
}

double LifeCurve::sd_inverse(double sigma_a) const {
  if (sigma_a < 0) throw NoBracket("shake-down inverse of a negative stress");
  return neuber_energy_inverse(sigma_a * sigma_a / E_);
}

double LifeCurve::cmb(double n_cycles) const {
  return (sf_ / E_) * std::pow(2.0 * n_cycles, b_) + ef_ * std::pow(2.0 * n_cycles, c_);
}

double LifeCurve::cmb_prime(double n_cycles) const {
  return 2.0 * b_ * (sf_ / E_) * std::pow(2.0 * n_cycles, b_ - 1.0) +
         2.0 * c_ * ef_ * std::pow(2.0 * n_cycles, c_ - 1.0);
}

double LifeCurve::cmb_inverse(double eps) const {
  if (!(eps > 0)) throw NoBracket("CMB inverse of a non-positive strain amplitude");
  // CMB is the sum of two decreasing branches, so Ni lies above both
  // single-branch roots; start from the larger one.
  const double n_el = 0.5 * std::pow(eps * E_ / sf_, 1.0 / b_);
  const double n_pl = 0.5 * std::pow(eps / ef_, 1.0 / c_);
  const double x0 = std::max({n_el, n_pl, 1e-300});
  // beyond any horizon: the life is +inf for double purposes
  if (!std::isfinite(x0) || x0 > 1e150) return kInf;
  return invert_monotone([&](double n) { return cmb(n); },
                         [&](double n) { return cmb_prime(n); }, eps, x0, false);
}

double LifeCurve::det_life(double sigma_a) const {
  if (sigma_a <= 0) return kInf;
  return cmb_inverse(ramberg_osgood(sd_inverse(sigma_a)));
}

LifeCurve::ChainEval LifeCurve::chain(double s) const {
  ChainEval out;
  if (!(s > 0)) {  // Ni -> inf: zero intensity, zero slope (m̄ > 1 limit)
    out.ni = kInf;
    return out;
  }
  const double x = neuber_energy_inverse(s);  // σ_a^el-pl
  const double eps = ramberg_osgood(x);
  const double ni = cmb_inverse(eps);
  out.ni = ni;
  if (!std::isfinite(ni)) return out;  // zero contribution, zero slope
  out.w = std::pow(ni, -m_);
  // d(Ni^-m̄)/ds = -m̄ Ni^(-m̄-1) · (1/CMB'(Ni)) · RO'(x)/N'(x)
  out.dw_ds = -m_ * std::pow(ni, -m_ - 1.0) / cmb_prime(ni) *
              (ramberg_osgood_prime(x) / neuber_energy_prime(x));
  return out;
}

double von_mises_amplitude(const Eigen::Matrix3d& sigma) {
  const Eigen::Matrix3d dev = sigma - (sigma.trace() / 3.0) * Eigen::Matrix3d::Identity();
  const double sv = std::sqrt(1.5 * dev.squaredNorm());
  return 0.5 * sv;
}

Eigen::Matrix3d stress_at(const Mesh& mesh, const ElasticMaterial& mat,
                          const NodalField& U, int element, const Eigen::Vector3d& xi) {
  const Eigen::Matrix3d J = jacobian(mesh, element, xi);
  const auto grad_hat = mesh.ref().shape_gradient(xi);
  const Eigen::Matrix<double, Eigen::Dynamic, 3> G = grad_hat * J.inverse();
  const auto en = mesh.element_nodes(element);
  Eigen::Matrix3d q = Eigen::Matrix3d::Zero();  // ∇u = Σ_m u_m ⊗ ∇θ_m
  for (size_t m = 0; m < en.size(); ++m)
    q += U.row(en[m]).transpose() * G.row(static_cast<int>(m));
  const Eigen::Matrix3d eps = 0.5 * (q + q.transpose());
  return mat.lame_lambda() * q.trace() * Eigen::Matrix3d::Identity() +
         2.0 * mat.lame_mu() * eps;
}

LifeResult objective_J(const Mesh& mesh, const ElasticMaterial& elastic,
                       const LcfMaterial& lcf, const NodalField& U,
                       const QuadratureConfig& quad, int threads,
                       std::optional<std::span<const FaceRef>> faces_opt) {
  const LifeCurve curve(elastic, lcf);
  const auto& re = mesh.ref();
  const auto rules = re.all_face_rules(quad);
  const double mu = elastic.lame_mu();
  const double E = elastic.youngs_modulus;
  const std::span<const FaceRef> faces =
      faces_opt ? *faces_opt : std::span<const FaceRef>(mesh.surface_faces);

  LifeResult res;
  res.m_bar = curve.m_bar();
  const int nfc = static_cast<int>(faces.size());
  res.face_contribution.assign(nfc, 0.0);
  res.qp_life.resize(nfc);

  parallel_for(nfc, threads, [&](int i) {
    const FaceRef f = faces[i];
    const auto X = mesh.element_coords(f.element);
    const auto en = mesh.element_nodes(f.element);
    const FaceRule& fr = rules[f.face];
    const double L = mesh.element_char_length(f.element);
    const int nsh = re.n_sh;
    double contrib = 0;
    auto& lives = res.qp_life[i];
    lives.assign(fr.weights.size(), 0.0);
    for (int l = 0; l < fr.weights.size(); ++l) {
      const Eigen::Matrix<double, 3, 2> JF = X.transpose() * fr.face_grad[l];
      const double detg = (JF.transpose() * JF).determinant();
      if (detg <= 0) throw DegenerateFace("surface face Gram determinant <= 0");

      const Eigen::Matrix3d J = X.transpose() * fr.grad[l];
      const double det = J.determinant();
      if (det < 1e-12 * L * L * L) throw DegenerateElement("surface element inverted");
      const Eigen::Matrix<double, Eigen::Dynamic, 3> G = fr.grad[l] * J.inverse();

      Eigen::Matrix3d q = Eigen::Matrix3d::Zero();
      for (int m = 0; m < nsh; ++m) q += U.row(en[m]).transpose() * G.row(m);
      // A = q + q^T - (2/3) tr(q) I;  σ_a²/E = (3μ²/8E) A:A
      const Eigen::Matrix3d A =
          q + q.transpose() - (2.0 / 3.0) * q.trace() * Eigen::Matrix3d::Identity();
      const double s = 3.0 * mu * mu / (8.0 * E) * A.squaredNorm();
      const auto ce = curve.chain(s);
      lives[l] = ce.ni;
      contrib += fr.weights(l) * std::sqrt(detg) * ce.w;
    }
    res.face_contribution[i] = contrib;
  });

  for (double v : res.face_contribution) res.J += v;
  res.eta = res.J > 0 ? std::pow(res.J, -1.0 / curve.m_bar()) : kInf;
  return res;
}

double pof(double J, double m_bar, double t) {
  return -std::expm1(-std::pow(t, m_bar) * J);
}

double crack_intensity(double t, double ni_det, double m_bar) {
  if (!std::isfinite(ni_det)) return 0;
  if (t == 0) return m_bar > 1 ? 0.0 : (m_bar == 1 ? 1.0 / ni_det : kInf);
  return m_bar / ni_det * std::pow(t / ni_det, m_bar - 1.0);
}

Eigen::VectorXd surface_intensity_field(const Mesh& mesh, const ElasticMaterial& elastic,
                                        const LcfMaterial& lcf, const NodalField& U,
                                        double t) {
  const LifeCurve curve(elastic, lcf);
  const auto& re = mesh.ref();
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(mesh.n_nodes());
  Eigen::VectorXd cnt = Eigen::VectorXd::Zero(mesh.n_nodes());
  for (const FaceRef& f : mesh.surface_faces) {
    const auto en = mesh.element_nodes(f.element);
    for (int k : re.faces[f.face].nodes) {
      const Eigen::Vector3d xi = re.node_coords.row(k);
      const double sa = von_mises_amplitude(stress_at(mesh, elastic, U, f.element, xi));
      const double ni = curve.det_life(sa);
      acc(en[k]) += crack_intensity(t, ni, curve.m_bar());
      cnt(en[k]) += 1;
    }
  }
  for (int i = 0; i < acc.size(); ++i)
    if (cnt(i) > 0) acc(i) /= cnt(i);
  return acc;
}

double peak_von_mises(const Mesh& mesh, const ElasticMaterial& elastic,
                      const NodalField& U, const QuadratureConfig& quad) {
  const VolumeRule rule = mesh.ref().volume_rule(quad);
  double peak = 0;
  for (int e = 0; e < mesh.n_elements(); ++e)
    for (int l = 0; l < rule.weights.size(); ++l) {
      const Eigen::Vector3d xi = rule.points.row(l);
      const Eigen::Matrix3d sig = stress_at(mesh, elastic, U, e, xi);
      peak = std::max(peak, 2.0 * von_mises_amplitude(sig));
    }
  return peak;
}

Eigen::VectorXd nodal_von_mises(const Mesh& mesh, const ElasticMaterial& elastic,
                                const NodalField& U) {
  const auto& re = mesh.ref();
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(mesh.n_nodes());
  Eigen::VectorXd cnt = Eigen::VectorXd::Zero(mesh.n_nodes());
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto en = mesh.element_nodes(e);
    for (int k = 0; k < re.n_sh; ++k) {
      const Eigen::Vector3d xi = re.node_coords.row(k);
      acc(en[k]) += 2.0 * von_mises_amplitude(stress_at(mesh, elastic, U, e, xi));
      cnt(en[k]) += 1;
    }
  }
  for (int i = 0; i < acc.size(); ++i)
    if (cnt(i) > 0) acc(i) /= cnt(i);
  return acc;
}

CalibrationTable calibrate_probabilistic(double sigma_f, double eps_f, double b, double c,
                                         double m_bar, double specimen_area) {
  if (!(m_bar > 0) || !(specimen_area > 0))
    throw ConfigError("calibration needs m_bar > 0 and a positive specimen area");
  CalibrationTable t;
  t.det_sigma_f = sigma_f;
  t.det_eps_f = eps_f;
  // Quantile shift q_0.5 -> η with η = q_0.5 / log(2)^(1/m̄)  (natural log).
  t.scale_sigma_f = sigma_f * std::pow(std::log(2.0), -b / m_bar);
  t.scale_eps_f = eps_f * std::pow(std::log(2.0), -c / m_bar);
  // Statistical size effect: rescale to a fictitious unit-area specimen.
  t.prob_sigma_f = t.scale_sigma_f * std::pow(1.0 / specimen_area, b / m_bar);
  t.prob_eps_f = t.scale_eps_f * std::pow(1.0 / specimen_area, c / m_bar);
  return t;
}

}  // namespace lcfgrad
