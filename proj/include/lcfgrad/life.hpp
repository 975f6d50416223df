#pragma once

#include <optional>
#include <vector>

#include "lcfgrad/assembly.hpp"
#include "lcfgrad/material.hpp"
#include "lcfgrad/mesh.hpp"

namespace lcfgrad {

/// Scalar material-law chain  σ_a  →  Ni_det = CMB^{-1} ∘ RO ∘ SD^{-1}(σ_a)
/// with the Ramberg-Osgood relation, the Neuber shake-down and the
/// Coffin-Manson-Basquin curve. All inversions are bracketed Newton with
/// bisection fallback, relative tolerance 1e-12.
class LifeCurve {
 public:
  LifeCurve(const ElasticMaterial& elastic, const LcfMaterial& lcf);

  double m_bar() const { return m_; }
  double youngs_modulus() const { return E_; }

  /// ε_a = σ/E + (σ/K)^(1/n')
  double ramberg_osgood(double sigma) const;
  double ramberg_osgood_prime(double sigma) const;

  /// σ_a = sqrt(E (σ²/E + σ (σ/K)^(1/n')))
  double neuber_sd(double sigma_elpl) const;
  /// Inverse of the shake-down; NoBracket for negative arguments.
  double sd_inverse(double sigma_a) const;

  /// ε_a = (σ_f'/E)(2N)^b + ε_f'(2N)^c
  double cmb(double n_cycles) const;
  double cmb_prime(double n_cycles) const;
  double cmb_inverse(double eps) const;

  /// Deterministic cycles to crack initiation; +inf at σ_a = 0.
  double det_life(double sigma_a) const;

  /// Everything the adjoint chain rule needs at one quadrature point, as a
  /// function of s = σ_a²/E (which is what the displacement gradient gives).
  struct ChainEval {
    double ni = 0;     // Ni_det
    double w = 0;      // Ni^(-m̄), the surface integrand
    double dw_ds = 0;  // d(Ni^(-m̄)) / d(σ_a²/E)
  };
  ChainEval chain(double s) const;

 private:
  // N(x) = SD(x)²/E = x²/E + x (x/K)^(1/n'), the Neuber energy density map.
  double neuber_energy(double x) const;
  double neuber_energy_prime(double x) const;
  double neuber_energy_inverse(double s) const;

  double E_, K_, n_, sf_, ef_, b_, c_, m_;
};

/// σ_v/2 with σ_v² = (3/2) σ':σ'; normalized so a uniaxial state
/// diag(s,0,0) gives σ_v = s.
double von_mises_amplitude(const Eigen::Matrix3d& sigma);

/// σ = λ (∇·u) I + 2μ ε(u) from the FE solution at a reference point.
Eigen::Matrix3d stress_at(const Mesh& mesh, const ElasticMaterial& mat,
                          const NodalField& U, int element, const Eigen::Vector3d& xi);

/// Discretized objective J ≈ Σ_F Σ_l ω̂_l (1/Ni_det)^m̄ sqrt(det g_F) and the
/// Weibull scale η = J^(-1/m̄). Per-face contributions and per-quadrature-point
/// lives are kept for export and additivity checks.
struct LifeResult {
  double J = 0;    // [cycles^(-m̄)]
  double eta = 0;  // [cycles]
  double m_bar = 0;
  std::vector<double> face_contribution;       // per surface face
  std::vector<std::vector<double>> qp_life;    // Ni_det per face, per point
};

LifeResult objective_J(const Mesh& mesh, const ElasticMaterial& elastic,
                       const LcfMaterial& lcf, const NodalField& U,
                       const QuadratureConfig& quad = {}, int threads = 1,
                       std::optional<std::span<const FaceRef>> faces = std::nullopt);

/// PoF(t) = 1 - exp(-t^m̄ J)
double pof(double J, double m_bar, double t);

/// Local crack-formation intensity ϱ(t) = (m̄/Ni)(t/Ni)^(m̄-1)  [1/(mm² cycle)]
double crack_intensity(double t, double ni_det, double m_bar);

/// Per-surface-node intensity field for export (zero at interior nodes).
Eigen::VectorXd surface_intensity_field(const Mesh& mesh, const ElasticMaterial& elastic,
                                        const LcfMaterial& lcf, const NodalField& U,
                                        double t);

/// Max von Mises stress over all volume quadrature points.
double peak_von_mises(const Mesh& mesh, const ElasticMaterial& elastic,
                      const NodalField& U, const QuadratureConfig& quad = {});

/// Per-node averaged von Mises stress for export.
Eigen::VectorXd nodal_von_mises(const Mesh& mesh, const ElasticMaterial& elastic,
                                const NodalField& U);

/// Deterministic → probabilistic CMB parameters: first the quantile shift
/// σ_f' log(2)^(-b/m̄), ε_f' log(2)^(-c/m̄), then the size-effect rescaling to
/// unit surface area with (1/area)^(b/m̄) and (1/area)^(c/m̄).
struct CalibrationTable {
  double det_sigma_f, det_eps_f;      // 50% quantile curve (input)
  double scale_sigma_f, scale_eps_f;  // Weibull scale curve, same area
  double prob_sigma_f, prob_eps_f;    // probabilistic, |∂Ω| = 1
};
CalibrationTable calibrate_probabilistic(double sigma_f, double eps_f, double b, double c,
                                         double m_bar, double specimen_area);

}  // namespace lcfgrad
