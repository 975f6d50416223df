#pragma once

#include <functional>

#include "lcfgrad/mesh.hpp"

namespace lcfgrad {

/// Purpose-built small geometries for the oracle suites and the CLI demos.
/// (The geometries used in the reference results are not published; these
/// stand in for them.)

/// Structured block of nx x ny x nz cells over [0,Lx]x[0,Ly]x[0,Lz].
/// Optionally clamps the x=0 nodes and marks the x=Lx faces as loaded.
Mesh box_mesh(ElementKind kind, int nx, int ny, int nz, const Eigen::Vector3d& lengths,
              bool clamp_xmin = true, bool load_xmax = true);

/// Rod of square cross-section (width x width) along x with its centerline
/// bent by height·sin(pi x/length) in +y. Clamped at x=0, loaded at x=length.
Mesh bent_rod_mesh(ElementKind kind, int nx, int ny, int nz, double length = 6.0,
                   double height = 3.0, double width = 1.0);

/// Full annulus around the x axis (inner bore clamped, no traction faces);
/// n_theta cells around the circumference.
Mesh ring_mesh(ElementKind kind, int n_axial, int n_radial, int n_theta, double r_inner,
               double r_outer, double width);

/// Patch of a spherical shell (outer radius R, thickness t); the outer
/// surface has analytically radial normals.
Mesh spherical_shell_mesh(int n_radial, int n_theta, int n_phi, double radius,
                          double thickness);

/// Applies f to every node coordinate (midside nodes included).
void map_nodes(Mesh& mesh, const std::function<Eigen::Vector3d(const Eigen::Vector3d&)>& f);

/// Surface faces whose corner nodes all satisfy the predicate.
std::vector<FaceRef> faces_where(const Mesh& mesh,
                                 const std::function<bool(const Eigen::Vector3d&)>& pred);

/// Nodes satisfying a coordinate predicate.
std::vector<int> nodes_where(const Mesh& mesh,
                             const std::function<bool(const Eigen::Vector3d&)>& pred);

}  // namespace lcfgrad
