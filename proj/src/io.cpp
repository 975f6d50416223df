#include "lcfgrad/io.hpp"

#include <cstdio>
#include <fstream>

#include "lcfgrad/errors.hpp"

namespace lcfgrad {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

int vtk_cell_type(ElementKind kind) {
  switch (kind) {
    case ElementKind::Tet4:
      return 10;
    case ElementKind::Hex8:
      return 12;
    case ElementKind::Hex20:
      return 25;  // quadratic hexahedron; midside order matches ours
  }
  return 0;
}

}  // namespace

void write_vtk(const std::filesystem::path& path, const Mesh& mesh,
               const std::vector<std::pair<std::string, NodalField>>& vectors,
               const std::vector<std::pair<std::string, Eigen::VectorXd>>& scalars,
               const std::string& title) {
  auto out = open_out(path);
  const int N = mesh.n_nodes();
  const int nel = mesh.n_elements();
  const int nsh = mesh.nodes_per_element();
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << N << " double\n";
  for (int i = 0; i < N; ++i)
    out << format_double(mesh.nodes(i, 0)) << " " << format_double(mesh.nodes(i, 1)) << " "
        << format_double(mesh.nodes(i, 2)) << "\n";
  out << "CELLS " << nel << " " << nel * (nsh + 1) << "\n";
  for (int e = 0; e < nel; ++e) {
    out << nsh;
    for (int j : mesh.element_nodes(e)) out << " " << j;
    out << "\n";
  }
  out << "CELL_TYPES " << nel << "\n";
  for (int e = 0; e < nel; ++e) out << vtk_cell_type(mesh.kind) << "\n";
  out << "POINT_DATA " << N << "\n";
  for (const auto& [name, field] : vectors) {
    out << "VECTORS " << name << " double\n";
    for (int i = 0; i < N; ++i)
      out << format_double(field(i, 0)) << " " << format_double(field(i, 1)) << " "
          << format_double(field(i, 2)) << "\n";
  }
  for (const auto& [name, field] : scalars) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (int i = 0; i < N; ++i) out << format_double(field(i)) << "\n";
  }
}

void write_field_csv(const std::filesystem::path& path, const Mesh& mesh,
                     const NodalField& field, const std::string& prefix) {
  auto out = open_out(path);
  out << "node,x,y,z," << prefix << "x," << prefix << "y," << prefix << "z\n";
  for (int i = 0; i < mesh.n_nodes(); ++i) {
    out << i;
    for (int d = 0; d < 3; ++d) out << "," << format_double(mesh.nodes(i, d));
    for (int d = 0; d < 3; ++d) out << "," << format_double(field(i, d));
    out << "\n";
  }
}

void write_gradient_csv(const std::filesystem::path& path, const Mesh& mesh,
                        const NodalField& grad, const Eigen::VectorXd& normal_component) {
  auto out = open_out(path);
  out << "node,x,y,z,gx,gy,gz,gn\n";
  for (int i = 0; i < mesh.n_nodes(); ++i) {
    out << i;
    for (int d = 0; d < 3; ++d) out << "," << format_double(mesh.nodes(i, d));
    for (int d = 0; d < 3; ++d) out << "," << format_double(grad(i, d));
    out << "," << format_double(normal_component(i)) << "\n";
  }
}

void write_pof_csv(const std::filesystem::path& path, const std::vector<double>& times,
                   const std::vector<double>& pofs) {
  auto out = open_out(path);
  out << "t,pof\n";
  for (size_t i = 0; i < times.size(); ++i)
    out << format_double(times[i]) << "," << format_double(pofs[i]) << "\n";
}

void write_fd_reports_csv(const std::filesystem::path& path,
                          const std::vector<FdReport>& reports) {
  auto out = open_out(path);
  out << "name,eps,fd_value,valid,analytic,rel_error,best_rel_error,best_eps,"
         "stable_rel_error,plateau\n";
  for (const FdReport& r : reports) {
    const double denom = std::max(std::abs(r.analytic), 1e-300);
    for (size_t i = 0; i < r.eps.size(); ++i) {
      const double err = r.valid[i] ? std::abs(r.fd_value[i] - r.analytic) / denom : -1.0;
      out << r.name << "," << format_double(r.eps[i]) << "," << format_double(r.fd_value[i])
          << "," << int(r.valid[i]) << "," << format_double(r.analytic) << ","
          << format_double(err) << "," << format_double(r.best_rel_error) << ","
          << format_double(r.best_eps) << "," << int(r.plateau) << "\n";
    }
  }
}

void write_calibration_csv(const std::filesystem::path& path, const CalibrationTable& t,
                           double b, double c, double m_bar, double area) {
  auto out = open_out(path);
  out << "row,sigma_f_prime,eps_f_prime,b,c,m_bar,surface_area\n";
  auto row = [&](const char* name, double sf, double ef, double m, double a) {
    out << name << "," << format_double(sf) << "," << format_double(ef) << ","
        << format_double(b) << "," << format_double(c) << "," << format_double(m) << ","
        << format_double(a) << "\n";
  };
  row("deterministic_q50", t.det_sigma_f, t.det_eps_f, m_bar, area);
  row("weibull_scale_q63", t.scale_sigma_f, t.scale_eps_f, m_bar, area);
  row("probabilistic", t.prob_sigma_f, t.prob_eps_f, m_bar, 1.0);
}

void write_matrix_market(const std::filesystem::path& path, const SparseSymMatrix& sys) {
  auto out = open_out(path);
  // Lower triangle only; the operator is symmetric.
  size_t nnz = 0;
  for (int k = 0; k < sys.mat.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(sys.mat, k); it; ++it)
      if (it.row() >= it.col()) ++nnz;
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << sys.mat.rows() << " " << sys.mat.cols() << " " << nnz << "\n";
  for (int k = 0; k < sys.mat.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(sys.mat, k); it; ++it)
      if (it.row() >= it.col())
        out << it.row() + 1 << " " << it.col() + 1 << " " << format_double(it.value())
            << "\n";
}

}  // namespace lcfgrad
