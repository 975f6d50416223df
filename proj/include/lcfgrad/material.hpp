#pragma once

#include <filesystem>

namespace lcfgrad {

/// Isotropic linear-elastic material, mm-N-MPa units (density in tonne/mm^3).
struct ElasticMaterial {
  double youngs_modulus = 0;  // E [MPa]
  double poisson_ratio = 0;   // ν
  double density = 0;         // ρ [tonne/mm^3]

  double lame_lambda() const {
    return youngs_modulus * poisson_ratio /
           ((1 + poisson_ratio) * (1 - 2 * poisson_ratio));
  }
  double lame_mu() const { return youngs_modulus / (2 * (1 + poisson_ratio)); }

  void check() const;  // μ>0, -1<ν<0.5
};

/// Ramberg-Osgood hardening plus probabilistic Coffin-Manson-Basquin
/// constants and the Weibull shape.
struct LcfMaterial {
  double hardening_K = 0;     // K [MPa]
  double hardening_n = 0;     // n'
  double sigma_f_prime = 0;   // σ_f' [MPa·mm^(2b/m̄)] in probabilistic use
  double eps_f_prime = 0;     // ε_f' [mm^(2c/m̄)]
  double b = 0;               // Basquin exponent, b < c < 0
  double c = 0;               // Coffin-Manson exponent
  double m_bar = 0;           // Weibull shape m̄ > 0
  double surface_area = 1.0;  // |∂Ω| the parameters refer to [mm^2]

  void check() const;
};

ElasticMaterial read_elastic_json(const std::filesystem::path& path);
LcfMaterial read_lcf_json(const std::filesystem::path& path);
void write_elastic_json(const ElasticMaterial& m, const std::filesystem::path& path);
void write_lcf_json(const LcfMaterial& m, const std::filesystem::path& path);

}  // namespace lcfgrad
