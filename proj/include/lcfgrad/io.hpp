#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "lcfgrad/assembly.hpp"
#include "lcfgrad/fdcheck.hpp"
#include "lcfgrad/life.hpp"
#include "lcfgrad/mesh.hpp"

namespace lcfgrad {

/// Legacy ASCII VTK unstructured grid with point data. All numbers are
/// written with "%.17g" so repeated runs produce identical bytes.
void write_vtk(const std::filesystem::path& path, const Mesh& mesh,
               const std::vector<std::pair<std::string, NodalField>>& vectors,
               const std::vector<std::pair<std::string, Eigen::VectorXd>>& scalars,
               const std::string& title = "lcfgrad output");

/// node,x,y,z,ux,uy,uz
void write_field_csv(const std::filesystem::path& path, const Mesh& mesh,
                     const NodalField& field, const std::string& prefix);

/// node,x,y,z,gx,gy,gz,gn
void write_gradient_csv(const std::filesystem::path& path, const Mesh& mesh,
                        const NodalField& grad, const Eigen::VectorXd& normal_component);

/// t,pof
void write_pof_csv(const std::filesystem::path& path, const std::vector<double>& times,
                   const std::vector<double>& pofs);

/// name,eps,fd_value,valid,analytic,rel_error,best_rel_error,best_eps,plateau
void write_fd_reports_csv(const std::filesystem::path& path,
                          const std::vector<FdReport>& reports);

/// row,sigma_f_prime,eps_f_prime,b,c,m_bar,surface_area
void write_calibration_csv(const std::filesystem::path& path, const CalibrationTable& t,
                           double b, double c, double m_bar, double area);

/// MatrixMarket coordinate format (debug dump of the assembled system).
void write_matrix_market(const std::filesystem::path& path, const SparseSymMatrix& sys);

std::string format_double(double v);  // "%.17g"

}  // namespace lcfgrad
