#include "lcfgrad/material.hpp"

#include <fstream>

#include <json.hpp>

#include "lcfgrad/errors.hpp"

namespace lcfgrad {

void ElasticMaterial::check() const {
  if (!(youngs_modulus > 0)) throw ConfigError("youngs_modulus must be positive");
  if (!(poisson_ratio > -1 && poisson_ratio < 0.5))
    throw ConfigError("poisson_ratio must lie in (-1, 0.5)");
  if (density < 0) throw ConfigError("density must be non-negative");
}

void LcfMaterial::check() const {
  if (!(hardening_K > 0 && hardening_n > 0))
    throw ConfigError("hardening constants K, n' must be positive");
  if (!(b < c && c < 0)) throw ConfigError("CMB exponents must satisfy b < c < 0");
  if (!(sigma_f_prime > 0 && eps_f_prime > 0))
    throw ConfigError("CMB coefficients must be positive");
  if (!(m_bar > 0)) throw ConfigError("Weibull shape m_bar must be positive");
  if (!(surface_area > 0)) throw ConfigError("surface_area must be positive");
}

namespace {

nlohmann::json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return j;
}

double need(const nlohmann::json& j, const char* key, const std::filesystem::path& path) {
  if (!j.contains(key)) throw ConfigError(path.string() + ": missing key '" + key + "'");
  return j[key].get<double>();
}

}  // namespace

ElasticMaterial read_elastic_json(const std::filesystem::path& path) {
  const auto j = load_json(path);
  ElasticMaterial m;
  m.youngs_modulus = need(j, "youngs_modulus", path);
  m.poisson_ratio = need(j, "poisson_ratio", path);
  m.density = j.value("density", 0.0);
  m.check();
  return m;
}

LcfMaterial read_lcf_json(const std::filesystem::path& path) {
  const auto j = load_json(path);
  LcfMaterial m;
  m.hardening_K = need(j, "K", path);
  m.hardening_n = need(j, "n_prime", path);
  m.sigma_f_prime = need(j, "sigma_f_prime", path);
  m.eps_f_prime = need(j, "eps_f_prime", path);
  m.b = need(j, "b", path);
  m.c = need(j, "c", path);
  m.m_bar = need(j, "m_bar", path);
  m.surface_area = j.value("surface_area", 1.0);
  m.check();
  return m;
}

void write_elastic_json(const ElasticMaterial& m, const std::filesystem::path& path) {
  nlohmann::json j{{"youngs_modulus", m.youngs_modulus},
                   {"poisson_ratio", m.poisson_ratio},
                   {"density", m.density}};
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << j.dump(1) << "\n";
}

void write_lcf_json(const LcfMaterial& m, const std::filesystem::path& path) {
  nlohmann::json j{{"K", m.hardening_K},   {"n_prime", m.hardening_n},
                   {"sigma_f_prime", m.sigma_f_prime}, {"eps_f_prime", m.eps_f_prime},
                   {"b", m.b},             {"c", m.c},
                   {"m_bar", m.m_bar},     {"surface_area", m.surface_area}};
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << j.dump(1) << "\n";
}

}  // namespace lcfgrad
