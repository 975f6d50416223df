#include "lcfgrad/run.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "lcfgrad/adjoint.hpp"
#include "lcfgrad/errors.hpp"
#include "lcfgrad/parallel.hpp"

namespace lcfgrad {

const char* kVersion = "lcfgrad 1.0.0";

int RunConfig::effective_threads() const {
  return threads > 0 ? threads : hardware_threads();
}

namespace {

std::string fnv1a_hex(const std::string& bytes) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Eigen::Vector3d parse_vec3(const nlohmann::json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

LoadCase parse_load(const nlohmann::json& j) {
  LoadCase load;
  if (j.contains("volume")) {
    const auto& v = j["volume"];
    const std::string type = v.value("type", "none");
    if (type == "constant")
      load.volume = LoadCase::ConstantBody{parse_vec3(v.at("density"))};
    else if (type == "centrifugal")
      load.volume = LoadCase::Centrifugal{v.at("omega").get<double>(),
                                          v.at("density").get<double>()};
    else if (type != "none")
      throw ConfigError("unknown volume load type: " + type);
  }
  if (j.contains("traction")) {
    const auto& t = j["traction"];
    const std::string type = t.value("type", "none");
    if (type == "fixed")
      load.traction = LoadCase::FixedTraction{parse_vec3(t.at("density"))};
    else if (type == "force")
      load.traction = LoadCase::ForceControlled{parse_vec3(t.at("total"))};
    else if (type != "none")
      throw ConfigError("unknown traction type: " + type);
  }
  return load;
}

}  // namespace

RunConfig read_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  RunConfig cfg;
  cfg.config_path = path;
  cfg.config_hash = fnv1a_hex(bytes);
  try {
    const auto base = path.parent_path();
    auto resolve = [&](const std::string& p) {
      std::filesystem::path fp(p);
      return fp.is_absolute() ? fp : base / fp;
    };
    if (j.contains("mesh")) cfg.mesh_path = resolve(j["mesh"].get<std::string>());
    if (j.contains("elastic")) cfg.elastic_path = resolve(j["elastic"].get<std::string>());
    if (j.contains("lcf")) cfg.lcf_path = resolve(j["lcf"].get<std::string>());
    if (j.contains("load")) cfg.load = parse_load(j["load"]);
    if (j.contains("quadrature")) {
      const auto& q = j["quadrature"];
      cfg.quadrature.reduced_volume = q.value("reduced_volume", false);
      cfg.quadrature.hex_volume_1d = q.value("hex_volume_1d", 0);
      cfg.quadrature.tet_volume_points = q.value("tet_volume_points", 0);
      cfg.quadrature.quad_face_1d = q.value("quad_face_1d", 0);
      cfg.quadrature.tri_face_points = q.value("tri_face_points", 0);
    }
    if (j.contains("solver")) {
      const auto& s = j["solver"];
      const std::string method = s.value("method", "direct");
      if (method == "direct")
        cfg.solver.method = SolverOptions::Method::Direct;
      else if (method == "cg")
        cfg.solver.method = SolverOptions::Method::ConjugateGradient;
      else
        throw ConfigError("unknown solver method: " + method);
      cfg.solver.tol = s.value("tol", 1e-10);
      cfg.solver.max_iterations = s.value("max_iterations", 20000);
    }
    if (j.contains("pof_times"))
      for (const auto& t : j["pof_times"]) {
        const double tv = t.get<double>();
        if (tv < 0) throw ConfigError("pof_times must be non-negative");
        cfg.pof_times.push_back(tv);
      }
    if (j.contains("output")) {
      const auto& o = j["output"];
      if (o.contains("directory")) cfg.output_dir = resolve(o["directory"].get<std::string>());
      cfg.write_vtk_files = o.value("vtk", true);
      cfg.write_csv_files = o.value("csv", true);
    }
    if (j.contains("validation")) {
      const auto& v = j["validation"];
      cfg.thresholds.partial = v.value("threshold_partial", 0.002);
      cfg.thresholds.contraction = v.value("threshold_contraction", 0.002);
      cfg.thresholds.total = v.value("threshold_total", 0.01);
      cfg.validation_seed = v.value("seed", 20240608u);
      for (double t : {cfg.thresholds.partial, cfg.thresholds.contraction,
                       cfg.thresholds.total})
        if (!(t > 0 && t <= 1)) throw ConfigError("validation thresholds must lie in (0,1]");
    }
    cfg.threads = j.value("threads", 0);
    cfg.debug_zero_adjoint = j.value("debug_zero_adjoint", false);
    if (j.contains("calibration")) {
      const auto& c = j["calibration"];
      RunConfig::Calibration cal;
      cal.sigma_f_prime = c.at("sigma_f_prime").get<double>();
      cal.eps_f_prime = c.at("eps_f_prime").get<double>();
      cal.b = c.at("b").get<double>();
      cal.c = c.at("c").get<double>();
      cal.m_bar = c.at("m_bar").get<double>();
      cal.area = c.at("area").get<double>();
      cfg.calibration = cal;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return cfg;
}

namespace {

struct Pipeline {
  Mesh mesh;
  ElasticMaterial elastic;
  LcfMaterial lcf;
  SparseSymMatrix sys;
  NodalField F_raw;  // before constraints
  NodalField F;
  NodalField U;
};

Pipeline solve_state(const RunConfig& cfg, bool need_lcf) {
  if (cfg.mesh_path.empty()) throw ConfigError("config needs a 'mesh' entry");
  if (cfg.elastic_path.empty()) throw ConfigError("config needs an 'elastic' entry");
  Pipeline p;
  p.mesh = read_mesh_json(cfg.mesh_path);
  p.elastic = read_elastic_json(cfg.elastic_path);
  if (need_lcf) {
    if (cfg.lcf_path.empty()) throw ConfigError("config needs an 'lcf' entry");
    p.lcf = read_lcf_json(cfg.lcf_path);
  }
  const int threads = cfg.effective_threads();
  p.sys = assemble_stiffness(p.mesh, p.elastic, cfg.quadrature, threads);
  p.F_raw = assemble_load(p.mesh, cfg.load, cfg.quadrature, threads);
  p.F = p.F_raw;
  apply_dirichlet(p.sys, p.F, p.mesh.dirichlet_nodes);
  p.U = solve(p.sys, p.F, cfg.solver);
  if (cfg.debug_dump) {
    std::filesystem::create_directories(cfg.output_dir);
    write_matrix_market(cfg.output_dir / "system.mtx", p.sys);
  }
  return p;
}

class Manifest {
 public:
  Manifest(const RunConfig& cfg, std::string command)
      : cfg_(cfg), command_(std::move(command)), start_(std::chrono::steady_clock::now()) {
    std::filesystem::create_directories(cfg.output_dir);
  }
  void add_output(const std::filesystem::path& p) { outputs_.push_back(p.string()); }
  void write() const {
    nlohmann::json j;
    j["command"] = command_;
    j["config"] = cfg_.config_path.string();
    j["config_hash"] = cfg_.config_hash;
    j["version"] = kVersion;
    j["threads"] = cfg_.effective_threads();
    j["outputs"] = outputs_;
    const auto dt = std::chrono::steady_clock::now() - start_;
    j["wall_time_s"] = std::chrono::duration<double>(dt).count();
    std::ofstream out(cfg_.output_dir / "run_manifest.json");
    out << j.dump(1) << "\n";
  }

 private:
  const RunConfig& cfg_;
  std::string command_;
  std::chrono::steady_clock::time_point start_;
  std::vector<std::string> outputs_;
};

}  // namespace

int cmd_solve(const RunConfig& cfg) {
  Manifest manifest(cfg, "solve");
  Pipeline p = solve_state(cfg, false);
  const double peak = peak_von_mises(p.mesh, p.elastic, p.U, cfg.quadrature);

  // Reaction forces at the clamped nodes balance the applied load.
  const Eigen::Map<const Eigen::VectorXd> u(p.U.data(), p.U.size());
  SparseSymMatrix raw = assemble_stiffness(p.mesh, p.elastic, cfg.quadrature,
                                           cfg.effective_threads());
  const Eigen::VectorXd r = raw.mat * u;
  Eigen::Vector3d reaction = Eigen::Vector3d::Zero();
  for (int j : p.mesh.dirichlet_nodes)
    for (int d = 0; d < 3; ++d)
      reaction(d) += r(3 * j + d) - p.F_raw(j, d);

  std::cout << "nodes " << p.mesh.n_nodes() << ", elements " << p.mesh.n_elements()
            << " (" << to_string(p.mesh.kind) << ")\n";
  std::cout << "peak von Mises stress: " << peak << " MPa\n";
  std::cout << "reaction force at clamped nodes: [" << reaction.x() << ", " << reaction.y()
            << ", " << reaction.z() << "] N\n";

  if (cfg.write_csv_files) {
    write_field_csv(cfg.output_dir / "u.csv", p.mesh, p.U, "u");
    manifest.add_output(cfg.output_dir / "u.csv");
  }
  if (cfg.write_vtk_files) {
    write_vtk(cfg.output_dir / "u.vtk", p.mesh, {{"displacement", p.U}},
              {{"von_mises", nodal_von_mises(p.mesh, p.elastic, p.U)}});
    manifest.add_output(cfg.output_dir / "u.vtk");
  }
  manifest.write();
  return kExitOk;
}

int cmd_pof(const RunConfig& cfg) {
  Manifest manifest(cfg, "pof");
  Pipeline p = solve_state(cfg, true);
  const LifeResult life = objective_J(p.mesh, p.elastic, p.lcf, p.U, cfg.quadrature,
                                      cfg.effective_threads());
  std::cout << "J = " << life.J << " cycles^-" << life.m_bar << "\n";
  std::cout << "eta (Weibull scale) = " << life.eta << " cycles\n";
  std::vector<double> pofs;
  for (double t : cfg.pof_times) {
    pofs.push_back(pof(life.J, life.m_bar, t));
    std::cout << "PoF(" << t << ") = " << pofs.back() << "\n";
  }
  if (cfg.write_csv_files) {
    write_pof_csv(cfg.output_dir / "pof.csv", cfg.pof_times, pofs);
    manifest.add_output(cfg.output_dir / "pof.csv");
  }
  if (cfg.write_vtk_files) {
    const double t_ref = cfg.pof_times.empty() ? 1.0 : cfg.pof_times.front();
    write_vtk(cfg.output_dir / "intensity.vtk", p.mesh, {{"displacement", p.U}},
              {{"crack_intensity",
                surface_intensity_field(p.mesh, p.elastic, p.lcf, p.U, t_ref)}});
    manifest.add_output(cfg.output_dir / "intensity.vtk");
  }
  manifest.write();
  return kExitOk;
}

int cmd_sensitivity(const RunConfig& cfg) {
  Manifest manifest(cfg, "sensitivity");
  Pipeline p = solve_state(cfg, true);
  const int threads = cfg.effective_threads();
  const NodalField dj_du = assemble_nodal(
      p.mesh, objective_du_local(p.mesh, p.elastic, p.lcf, p.U, cfg.quadrature, threads));
  NodalField lambda;
  if (cfg.debug_zero_adjoint)
    lambda = NodalField::Zero(p.mesh.n_nodes(), 3);
  else
    lambda = adjoint_solve(p.sys, dj_du, cfg.solver);
  const ShapeGradient sg = shape_gradient(p.mesh, p.elastic, p.lcf, cfg.load, p.U, lambda,
                                          cfg.quadrature, threads);

  std::cout << "J = " << sg.J << " cycles^-" << sg.m_bar << "\n";
  std::vector<std::pair<double, int>> ranked;
  for (int j = 0; j < p.mesh.n_nodes(); ++j)
    ranked.emplace_back(std::abs(sg.normal_component(j)), j);
  std::sort(ranked.rbegin(), ranked.rend());
  std::cout << "top nodes by |dJ/dX . n|:\n";
  for (int k = 0; k < std::min<int>(10, ranked.size()); ++k)
    std::cout << "  node " << ranked[k].second << "  " << sg.normal_component(ranked[k].second)
              << "\n";

  const double t_ref = cfg.pof_times.empty() ? 1.0 : cfg.pof_times.front();
  if (cfg.write_csv_files) {
    write_gradient_csv(cfg.output_dir / "gradient.csv", p.mesh, sg.dJ_dX,
                       sg.normal_component);
    manifest.add_output(cfg.output_dir / "gradient.csv");
  }
  if (cfg.write_vtk_files) {
    write_vtk(cfg.output_dir / "gradient.vtk", p.mesh,
              {{"dJ_dX", sg.dJ_dX}, {"dPoF_dX", sg.dPoF_dX(t_ref)}},
              {{"normal_component", sg.normal_component},
               {"crack_intensity",
                surface_intensity_field(p.mesh, p.elastic, p.lcf, p.U, t_ref)}});
    manifest.add_output(cfg.output_dir / "gradient.vtk");
  }
  manifest.write();
  return kExitOk;
}

int cmd_validate(const RunConfig& cfg) {
  Manifest manifest(cfg, "validate");
  if (cfg.mesh_path.empty() || cfg.elastic_path.empty() || cfg.lcf_path.empty())
    throw ConfigError("validate needs mesh, elastic and lcf entries");
  const Mesh mesh = read_mesh_json(cfg.mesh_path);
  const ElasticMaterial elastic = read_elastic_json(cfg.elastic_path);
  const LcfMaterial lcf = read_lcf_json(cfg.lcf_path);
  const SuiteResult res =
      run_validation_suite(mesh, elastic, lcf, cfg.load, cfg.quadrature, cfg.solver,
                           cfg.thresholds, cfg.validation_seed, cfg.effective_threads());
  for (const FdReport& r : res.reports)
    std::cout << r.name << ": best_rel_error=" << r.best_rel_error
              << " at eps=" << r.best_eps
              << " stable=" << r.stable_rel_error
              << (r.plateau ? "" : " (no plateau)") << "\n";
  if (cfg.write_csv_files) {
    write_fd_reports_csv(cfg.output_dir / "fd_reports.csv", res.reports);
    manifest.add_output(cfg.output_dir / "fd_reports.csv");
  }
  manifest.write();
  std::cout << (res.passed ? "validation PASSED\n" : "validation FAILED\n");
  return res.passed ? kExitOk : kExitValidation;
}

int cmd_calibrate(const RunConfig& cfg) {
  Manifest manifest(cfg, "calibrate");
  if (!cfg.calibration) throw ConfigError("config needs a 'calibration' block");
  const auto& c = *cfg.calibration;
  const CalibrationTable t =
      calibrate_probabilistic(c.sigma_f_prime, c.eps_f_prime, c.b, c.c, c.m_bar, c.area);
  std::cout << "row                sigma_f'   eps_f'    area\n";
  std::cout << "deterministic q50  " << t.det_sigma_f << "  " << t.det_eps_f << "  " << c.area
            << "\n";
  std::cout << "weibull scale q63  " << t.scale_sigma_f << "  " << t.scale_eps_f << "  "
            << c.area << "\n";
  std::cout << "probabilistic      " << t.prob_sigma_f << "  " << t.prob_eps_f << "  1\n";
  if (cfg.write_csv_files) {
    write_calibration_csv(cfg.output_dir / "calibration.csv", t, c.b, c.c, c.m_bar, c.area);
    manifest.add_output(cfg.output_dir / "calibration.csv");
  }
  manifest.write();
  return kExitOk;
}

int run_command(const std::string& name, const RunConfig& cfg) {
  try {
    if (name == "solve") return cmd_solve(cfg);
    if (name == "pof") return cmd_pof(cfg);
    if (name == "sensitivity") return cmd_sensitivity(cfg);
    if (name == "validate") return cmd_validate(cfg);
    if (name == "calibrate") return cmd_calibrate(cfg);
    std::cerr << "unknown command " << name << "\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  }
}

}  // namespace lcfgrad
