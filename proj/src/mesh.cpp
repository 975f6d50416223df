#include "lcfgrad/mesh.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include <json.hpp>

#include "lcfgrad/errors.hpp"

namespace lcfgrad {

Eigen::Matrix<double, Eigen::Dynamic, 3> Mesh::element_coords(int e) const {
  const auto en = element_nodes(e);
  Eigen::Matrix<double, Eigen::Dynamic, 3> X(en.size(), 3);
  for (size_t i = 0; i < en.size(); ++i) X.row(static_cast<int>(i)) = nodes.row(en[i]);
  return X;
}

double Mesh::element_char_length(int e) const {
  const auto en = element_nodes(e);
  Eigen::Vector3d lo = nodes.row(en[0]), hi = nodes.row(en[0]);
  for (int j : en) {
    lo = lo.cwiseMin(nodes.row(j).transpose());
    hi = hi.cwiseMax(nodes.row(j).transpose());
  }
  return (hi - lo).norm();
}

double Mesh::char_length() const {
  if (nodes.rows() == 0) return 0;
  Eigen::Vector3d lo = nodes.colwise().minCoeff();
  Eigen::Vector3d hi = nodes.colwise().maxCoeff();
  return (hi - lo).norm();
}

std::vector<FaceRef> extract_boundary(const Mesh& mesh) {
  const auto& re = mesh.ref();
  // Key a face by its sorted corner node ids (midside nodes are implied).
  const int n_corner = mesh.kind == ElementKind::Tet4 ? 3 : 4;
  std::map<std::vector<int>, std::vector<FaceRef>> owners;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto en = mesh.element_nodes(e);
    for (int f = 0; f < re.n_faces; ++f) {
      std::vector<int> key(n_corner);
      for (int i = 0; i < n_corner; ++i) key[i] = en[re.faces[f].nodes[i]];
      std::sort(key.begin(), key.end());
      owners[key].push_back({e, f});
    }
  }
  std::vector<FaceRef> boundary;
  for (const auto& [key, refs] : owners) {
    if (refs.size() > 2)
      throw NonManifold("face shared by " + std::to_string(refs.size()) + " elements");
    if (refs.size() == 1) boundary.push_back(refs[0]);
  }
  std::sort(boundary.begin(), boundary.end());
  return boundary;
}

void Mesh::finalize() {
  surface_faces = extract_boundary(*this);
  std::sort(dirichlet_nodes.begin(), dirichlet_nodes.end());
  std::sort(traction_faces.begin(), traction_faces.end());
  validate();
}

void Mesh::validate() const {
  const int N = n_nodes();
  const int nsh = nodes_per_element();
  if (static_cast<int>(conn.size()) != n_elements() * nsh)
    throw ConfigError("connectivity size is not a multiple of nodes per element");
  for (int e = 0; e < n_elements(); ++e) {
    const auto en = element_nodes(e);
    std::set<int> uniq(en.begin(), en.end());
    if (static_cast<int>(uniq.size()) != nsh)
      throw ConfigError("element " + std::to_string(e) + " has repeated nodes");
    for (int j : en)
      if (j < 0 || j >= N)
        throw ConfigError("element " + std::to_string(e) + " references node out of range");
  }
  const auto boundary = extract_boundary(*this);
  if (boundary != surface_faces)
    throw ConfigError("surface_faces does not match the mesh boundary");
  for (int j : dirichlet_nodes)
    if (j < 0 || j >= N) throw ConfigError("dirichlet node out of range");
  for (const FaceRef& f : traction_faces)
    if (!std::binary_search(surface_faces.begin(), surface_faces.end(), f))
      throw ConfigError("traction face (" + std::to_string(f.element) + "," +
                        std::to_string(f.face) + ") is not a boundary face");
}

Eigen::Vector3d transform(const Mesh& mesh, int element, const Eigen::Vector3d& xi) {
  const auto theta = mesh.ref().shape(xi);
  const auto en = mesh.element_nodes(element);
  Eigen::Vector3d x = Eigen::Vector3d::Zero();
  for (int r = 0; r < theta.size(); ++r) x += theta(r) * mesh.nodes.row(en[r]).transpose();
  return x;
}

Eigen::Matrix3d jacobian(const Mesh& mesh, int element, const Eigen::Vector3d& xi) {
  const auto grad = mesh.ref().shape_gradient(xi);
  const auto X = mesh.element_coords(element);
  const Eigen::Matrix3d J = X.transpose() * grad;
  const double L = mesh.element_char_length(element);
  if (J.determinant() < 1e-12 * L * L * L)
    throw DegenerateElement("element " + std::to_string(element) +
                            ": det " + std::to_string(J.determinant()));
  return J;
}

FaceGram face_gram(const Mesh& mesh, FaceRef face, const Eigen::Vector2d& uv) {
  const auto& re = mesh.ref();
  const auto& fm = re.faces.at(face.face);
  const Eigen::Vector3d xi = fm.origin + uv(0) * fm.a + uv(1) * fm.b;
  const auto grad = re.shape_gradient(xi);
  Eigen::Matrix<double, Eigen::Dynamic, 2> fg(re.n_sh, 2);
  fg.col(0) = grad * fm.a;
  fg.col(1) = grad * fm.b;
  const auto X = mesh.element_coords(face.element);
  const Eigen::Matrix<double, 3, 2> JF = X.transpose() * fg;
  FaceGram out;
  out.g = JF.transpose() * JF;
  const double det = out.g.determinant();
  const double L = mesh.element_char_length(face.element);
  if (det <= 1e-24 * L * L * L * L)
    throw DegenerateFace("face (" + std::to_string(face.element) + "," +
                         std::to_string(face.face) + ") has non-positive Gram determinant");
  out.sqrt_det = std::sqrt(det);
  return out;
}

Mesh read_mesh_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open mesh file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("mesh file " + path.string() + ": " + e.what());
  }
  try {
    Mesh mesh;
    mesh.kind = element_kind_from_string(j.at("elements").at("kind").get<std::string>());
    const auto& nodes = j.at("nodes");
    mesh.nodes.resize(static_cast<int>(nodes.size()), 3);
    for (int i = 0; i < mesh.nodes.rows(); ++i)
      for (int d = 0; d < 3; ++d) mesh.nodes(i, d) = nodes.at(i).at(d).get<double>();
    const int nsh = mesh.nodes_per_element();
    for (const auto& el : j.at("elements").at("conn")) {
      if (static_cast<int>(el.size()) != nsh)
        throw ConfigError("element with " + std::to_string(el.size()) + " nodes, expected " +
                          std::to_string(nsh));
      for (const auto& v : el) mesh.conn.push_back(v.get<int>());
    }
    if (j.contains("sets")) {
      const auto& sets = j["sets"];
      if (sets.contains("dirichlet"))
        for (const auto& v : sets["dirichlet"]) mesh.dirichlet_nodes.push_back(v.get<int>());
      if (sets.contains("traction_faces"))
        for (const auto& v : sets["traction_faces"])
          mesh.traction_faces.push_back({v.at(0).get<int>(), v.at(1).get<int>()});
    }
    mesh.finalize();
    return mesh;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("mesh file " + path.string() + ": " + e.what());
  }
}

void write_mesh_json(const Mesh& mesh, const std::filesystem::path& path) {
  nlohmann::json j;
  j["nodes"] = nlohmann::json::array();
  for (int i = 0; i < mesh.n_nodes(); ++i)
    j["nodes"].push_back({mesh.nodes(i, 0), mesh.nodes(i, 1), mesh.nodes(i, 2)});
  j["elements"]["kind"] = to_string(mesh.kind);
  j["elements"]["conn"] = nlohmann::json::array();
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto en = mesh.element_nodes(e);
    j["elements"]["conn"].push_back(std::vector<int>(en.begin(), en.end()));
  }
  j["sets"]["dirichlet"] = mesh.dirichlet_nodes;
  j["sets"]["traction_faces"] = nlohmann::json::array();
  for (const FaceRef& f : mesh.traction_faces)
    j["sets"]["traction_faces"].push_back({f.element, f.face});
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write mesh file " + path.string());
  out << j.dump(1) << "\n";
}

}  // namespace lcfgrad
