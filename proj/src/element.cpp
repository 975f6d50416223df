#include "lcfgrad/element.hpp"

#include <array>
#include <cmath>

#include "lcfgrad/errors.hpp"

namespace lcfgrad {

std::string to_string(ElementKind kind) {
  switch (kind) {
    case ElementKind::Tet4:
      return "TET4";
    case ElementKind::Hex8:
      return "HEX8";
    case ElementKind::Hex20:
      return "HEX20";
  }
  return "?";
}

ElementKind element_kind_from_string(const std::string& name) {
  if (name == "TET4") return ElementKind::Tet4;
  if (name == "HEX8") return ElementKind::Hex8;
  if (name == "HEX20") return ElementKind::Hex20;
  throw ConfigError("unknown element kind: " + name);
}

void gauss_legendre_1d(int n, std::vector<double>& x, std::vector<double>& w) {
  switch (n) {
    case 1:
      x = {0.0};
      w = {2.0};
      return;
    case 2:
      x = {-0.5773502691896257645091488, 0.5773502691896257645091488};
      w = {1.0, 1.0};
      return;
    case 3:
      x = {-0.7745966692414833770358531, 0.0, 0.7745966692414833770358531};
      w = {0.5555555555555555555555556, 0.8888888888888888888888889,
           0.5555555555555555555555556};
      return;
    case 4:
      x = {-0.8611363115940525752239465, -0.3399810435848562648026658,
           0.3399810435848562648026658, 0.8611363115940525752239465};
      w = {0.3478548451374538573730639, 0.6521451548625461426269361,
           0.6521451548625461426269361, 0.3478548451374538573730639};
      return;
    case 5:
      x = {-0.9061798459386639927976269, -0.5384693101056830910363144, 0.0,
           0.5384693101056830910363144, 0.9061798459386639927976269};
      w = {0.2369268850561890875142640, 0.4786286704993664680412915,
           0.5688888888888888888888889, 0.4786286704993664680412915,
           0.2369268850561890875142640};
      return;
    case 6:
      x = {-0.9324695142031520278123016, -0.6612093864662645136613996,
           -0.2386191860831969086305017, 0.2386191860831969086305017,
           0.6612093864662645136613996, 0.9324695142031520278123016};
      w = {0.1713244923791703450402961, 0.3607615730481386075698335,
           0.4679139345726910473898703, 0.4679139345726910473898703,
           0.3607615730481386075698335, 0.1713244923791703450402961};
      return;
    default:
      throw ConfigError("1D Gauss rule order must be 1..6");
  }
}

namespace {

// ---------------------------------------------------------------------------
// Shape functions
// ---------------------------------------------------------------------------

// Hex corner signs; corners 0..7 of [-1,1]^3, bottom face first.
constexpr double kHexSign[8][3] = {{-1, -1, -1}, {1, -1, -1}, {1, 1, -1}, {-1, 1, -1},
                                   {-1, -1, 1},  {1, -1, 1},  {1, 1, 1},  {-1, 1, 1}};

// Hex20 mid-edge node coords (nodes 8..19).
constexpr double kHex20Mid[12][3] = {{0, -1, -1}, {1, 0, -1}, {0, 1, -1}, {-1, 0, -1},
                                     {0, -1, 1},  {1, 0, 1},  {0, 1, 1},  {-1, 0, 1},
                                     {-1, -1, 0}, {1, -1, 0}, {1, 1, 0},  {-1, 1, 0}};

Eigen::VectorXd hex8_shape(const Eigen::Vector3d& p) {
  Eigen::VectorXd v(8);
  for (int i = 0; i < 8; ++i) {
    v(i) = 0.125 * (1 + kHexSign[i][0] * p.x()) * (1 + kHexSign[i][1] * p.y()) *
           (1 + kHexSign[i][2] * p.z());
  }
  return v;
}

Eigen::Matrix<double, Eigen::Dynamic, 3> hex8_grad(const Eigen::Vector3d& p) {
  Eigen::Matrix<double, Eigen::Dynamic, 3> g(8, 3);
  for (int i = 0; i < 8; ++i) {
    const double sx = kHexSign[i][0], sy = kHexSign[i][1], sz = kHexSign[i][2];
    g(i, 0) = 0.125 * sx * (1 + sy * p.y()) * (1 + sz * p.z());
    g(i, 1) = 0.125 * (1 + sx * p.x()) * sy * (1 + sz * p.z());
    g(i, 2) = 0.125 * (1 + sx * p.x()) * (1 + sy * p.y()) * sz;
  }
  return g;
}

// 20-node serendipity brick.
Eigen::VectorXd hex20_shape(const Eigen::Vector3d& p) {
  Eigen::VectorXd v(20);
  for (int i = 0; i < 8; ++i) {
    const double sx = kHexSign[i][0], sy = kHexSign[i][1], sz = kHexSign[i][2];
    const double s = sx * p.x() + sy * p.y() + sz * p.z();
    v(i) = 0.125 * (1 + sx * p.x()) * (1 + sy * p.y()) * (1 + sz * p.z()) * (s - 2.0);
  }
  for (int k = 0; k < 12; ++k) {
    const double mx = kHex20Mid[k][0], my = kHex20Mid[k][1], mz = kHex20Mid[k][2];
    double val = 0.25;
    val *= (mx == 0) ? (1 - p.x() * p.x()) : (1 + mx * p.x());
    val *= (my == 0) ? (1 - p.y() * p.y()) : (1 + my * p.y());
    val *= (mz == 0) ? (1 - p.z() * p.z()) : (1 + mz * p.z());
    v(8 + k) = val;
  }
  return v;
}

Eigen::Matrix<double, Eigen::Dynamic, 3> hex20_grad(const Eigen::Vector3d& p) {
  Eigen::Matrix<double, Eigen::Dynamic, 3> g(20, 3);
  for (int i = 0; i < 8; ++i) {
    const double sx = kHexSign[i][0], sy = kHexSign[i][1], sz = kHexSign[i][2];
    const double fx = 1 + sx * p.x(), fy = 1 + sy * p.y(), fz = 1 + sz * p.z();
    const double s = sx * p.x() + sy * p.y() + sz * p.z();
    // d/dx [fx (s-2)] = sx (s - 2) + fx sx = sx (s - 1 + sx x)
    g(i, 0) = 0.125 * fy * fz * sx * (s - 1 + sx * p.x());
    g(i, 1) = 0.125 * fx * fz * sy * (s - 1 + sy * p.y());
    g(i, 2) = 0.125 * fx * fy * sz * (s - 1 + sz * p.z());
  }
  for (int k = 0; k < 12; ++k) {
    const double m[3] = {kHex20Mid[k][0], kHex20Mid[k][1], kHex20Mid[k][2]};
    double f[3], df[3];
    for (int d = 0; d < 3; ++d) {
      if (m[d] == 0) {
        f[d] = 1 - p(d) * p(d);
        df[d] = -2 * p(d);
      } else {
        f[d] = 1 + m[d] * p(d);
        df[d] = m[d];
      }
    }
    g(8 + k, 0) = 0.25 * df[0] * f[1] * f[2];
    g(8 + k, 1) = 0.25 * f[0] * df[1] * f[2];
    g(8 + k, 2) = 0.25 * f[0] * f[1] * df[2];
  }
  return g;
}

Eigen::VectorXd tet4_shape(const Eigen::Vector3d& p) {
  Eigen::VectorXd v(4);
  v << 1 - p.x() - p.y() - p.z(), p.x(), p.y(), p.z();
  return v;
}

Eigen::Matrix<double, Eigen::Dynamic, 3> tet4_grad(const Eigen::Vector3d&) {
  Eigen::Matrix<double, Eigen::Dynamic, 3> g(4, 3);
  g << -1, -1, -1, 1, 0, 0, 0, 1, 0, 0, 0, 1;
  return g;
}

// ---------------------------------------------------------------------------
// Quadrature point sets
// ---------------------------------------------------------------------------

void hex_volume_points(int n1d, std::vector<Eigen::Vector3d>& pts, std::vector<double>& wts) {
  std::vector<double> x, w;
  gauss_legendre_1d(n1d, x, w);
  for (int i = 0; i < n1d; ++i)
    for (int j = 0; j < n1d; ++j)
      for (int k = 0; k < n1d; ++k) {
        pts.emplace_back(x[i], x[j], x[k]);
        wts.push_back(w[i] * w[j] * w[k]);
      }
}

void tet_volume_points(int n, std::vector<Eigen::Vector3d>& pts, std::vector<double>& wts) {
  switch (n) {
    case 1:
      pts = {{0.25, 0.25, 0.25}};
      wts = {1.0 / 6.0};
      return;
    case 4: {
      const double a = 0.5854101966249684544613761;  // (5+3*sqrt(5))/20
      const double b = 0.1381966011250105151795413;  // (5-sqrt(5))/20
      pts = {{b, b, b}, {a, b, b}, {b, a, b}, {b, b, a}};
      wts = {0.25 / 6, 0.25 / 6, 0.25 / 6, 0.25 / 6};
      return;
    }
    case 5: {
      pts = {{0.25, 0.25, 0.25},
             {0.5, 1.0 / 6, 1.0 / 6},
             {1.0 / 6, 0.5, 1.0 / 6},
             {1.0 / 6, 1.0 / 6, 0.5},
             {1.0 / 6, 1.0 / 6, 1.0 / 6}};
      wts = {-2.0 / 15, 3.0 / 40, 3.0 / 40, 3.0 / 40, 3.0 / 40};
      return;
    }
    default:
      throw ConfigError("tet volume rule must have 1, 4 or 5 points");
  }
}

void quad_face_points(int n1d, std::vector<Eigen::Vector2d>& pts, std::vector<double>& wts) {
  std::vector<double> x, w;
  gauss_legendre_1d(n1d, x, w);
  for (int i = 0; i < n1d; ++i)
    for (int j = 0; j < n1d; ++j) {
      pts.emplace_back(x[i], x[j]);
      wts.push_back(w[i] * w[j]);
    }
}

// Symmetric rules on the unit triangle {u,v >= 0, u+v <= 1}, weights sum to 1/2.
void tri_face_points(int n, std::vector<Eigen::Vector2d>& pts, std::vector<double>& wts) {
  switch (n) {
    case 1:
      pts = {{1.0 / 3, 1.0 / 3}};
      wts = {0.5};
      return;
    case 3:
      pts = {{1.0 / 6, 1.0 / 6}, {2.0 / 3, 1.0 / 6}, {1.0 / 6, 2.0 / 3}};
      wts = {1.0 / 6, 1.0 / 6, 1.0 / 6};
      return;
    case 6: {
      const double a = 0.4459484909159648863183925;
      const double b = 0.0915762135097707434595714;
      const double wa = 0.2233815896780114656950071 / 2;
      const double wb = 0.1099517436553218676383263 / 2;
      pts = {{a, a}, {1 - 2 * a, a}, {a, 1 - 2 * a},
             {b, b}, {1 - 2 * b, b}, {b, 1 - 2 * b}};
      wts = {wa, wa, wa, wb, wb, wb};
      return;
    }
    case 7: {
      const double a = 0.4701420641051150897704412;
      const double b = 0.1012865073234563388009874;
      const double wa = 0.1323941527885061807376493 / 2;
      const double wb = 0.1259391805448271525956839 / 2;
      pts = {{1.0 / 3, 1.0 / 3}, {a, a}, {1 - 2 * a, a}, {a, 1 - 2 * a},
             {b, b},             {1 - 2 * b, b}, {b, 1 - 2 * b}};
      wts = {0.225 / 2, wa, wa, wa, wb, wb, wb};
      return;
    }
    default:
      throw ConfigError("triangle face rule must have 1, 3, 6 or 7 points");
  }
}

// ---------------------------------------------------------------------------
// Element construction
// ---------------------------------------------------------------------------

ReferenceElement make_hex(int n_sh) {
  ReferenceElement e;
  e.kind = n_sh == 8 ? ElementKind::Hex8 : ElementKind::Hex20;
  e.n_sh = n_sh;
  e.n_faces = 6;
  e.faces_are_quads = true;
  e.reference_volume = 8.0;
  e.reference_face_measure = 4.0;
  e.node_coords.resize(n_sh, 3);
  for (int i = 0; i < 8; ++i)
    e.node_coords.row(i) << kHexSign[i][0], kHexSign[i][1], kHexSign[i][2];
  for (int i = 8; i < n_sh; ++i)
    e.node_coords.row(i) << kHex20Mid[i - 8][0], kHex20Mid[i - 8][1], kHex20Mid[i - 8][2];

  using V = Eigen::Vector3d;
  // a x b points outward; node lists outward-ordered (corners, then midsides).
  e.faces = {
      {V(0, 0, -1), V(0, 1, 0), V(1, 0, 0), {0, 3, 2, 1, 11, 10, 9, 8}},
      {V(0, 0, 1), V(1, 0, 0), V(0, 1, 0), {4, 5, 6, 7, 12, 13, 14, 15}},
      {V(0, -1, 0), V(1, 0, 0), V(0, 0, 1), {0, 1, 5, 4, 8, 17, 12, 16}},
      {V(1, 0, 0), V(0, 1, 0), V(0, 0, 1), {1, 2, 6, 5, 9, 18, 13, 17}},
      {V(0, 1, 0), V(0, 0, 1), V(1, 0, 0), {2, 3, 7, 6, 10, 19, 14, 18}},
      {V(-1, 0, 0), V(0, 0, 1), V(0, 1, 0), {3, 0, 4, 7, 11, 16, 15, 19}},
  };
  if (n_sh == 8)
    for (auto& f : e.faces) f.nodes.resize(4);
  return e;
}

ReferenceElement make_tet() {
  ReferenceElement e;
  e.kind = ElementKind::Tet4;
  e.n_sh = 4;
  e.n_faces = 4;
  e.faces_are_quads = false;
  e.reference_volume = 1.0 / 6.0;
  e.reference_face_measure = 0.5;
  e.node_coords.resize(4, 3);
  e.node_coords << 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1;

  using V = Eigen::Vector3d;
  e.faces = {
      {V(0, 0, 0), V(0, 1, 0), V(1, 0, 0), {0, 2, 1}},    // z = 0
      {V(0, 0, 0), V(1, 0, 0), V(0, 0, 1), {0, 1, 3}},    // y = 0
      {V(0, 0, 0), V(0, 0, 1), V(0, 1, 0), {0, 3, 2}},    // x = 0
      {V(1, 0, 0), V(-1, 1, 0), V(-1, 0, 1), {1, 2, 3}},  // x+y+z = 1
  };
  return e;
}

}  // namespace

Eigen::VectorXd ReferenceElement::shape(const Eigen::Vector3d& xi) const {
  switch (kind) {
    case ElementKind::Tet4:
      return tet4_shape(xi);
    case ElementKind::Hex8:
      return hex8_shape(xi);
    case ElementKind::Hex20:
      return hex20_shape(xi);
  }
  throw Error("bad kind");
}

Eigen::Matrix<double, Eigen::Dynamic, 3> ReferenceElement::shape_gradient(
    const Eigen::Vector3d& xi) const {
  switch (kind) {
    case ElementKind::Tet4:
      return tet4_grad(xi);
    case ElementKind::Hex8:
      return hex8_grad(xi);
    case ElementKind::Hex20:
      return hex20_grad(xi);
  }
  throw Error("bad kind");
}

VolumeRule ReferenceElement::volume_rule(const QuadratureConfig& q) const {
  std::vector<Eigen::Vector3d> pts;
  std::vector<double> wts;
  if (kind == ElementKind::Tet4) {
    tet_volume_points(q.tet_volume_points > 0 ? q.tet_volume_points : 4, pts, wts);
  } else {
    int n1d = q.hex_volume_1d;
    if (n1d <= 0) n1d = (kind == ElementKind::Hex20 && !q.reduced_volume) ? 3 : 2;
    if (n1d > 3) throw ConfigError("hex volume rule capped at 3x3x3");
    hex_volume_points(n1d, pts, wts);
  }
  VolumeRule r;
  const int lq = static_cast<int>(pts.size());
  r.points.resize(lq, 3);
  r.weights.resize(lq);
  r.shape.resize(lq, n_sh);
  r.grad.reserve(lq);
  for (int l = 0; l < lq; ++l) {
    r.points.row(l) = pts[l];
    r.weights(l) = wts[l];
    r.shape.row(l) = shape(pts[l]);
    r.grad.push_back(shape_gradient(pts[l]));
  }
  return r;
}

FaceRule ReferenceElement::face_rule(int face, const QuadratureConfig& q) const {
  const FaceMap& fm = faces.at(face);
  std::vector<Eigen::Vector2d> pts;
  std::vector<double> wts;
  if (faces_are_quads)
    quad_face_points(q.quad_face_1d > 0 ? q.quad_face_1d : 3, pts, wts);
  else
    tri_face_points(q.tri_face_points > 0 ? q.tri_face_points : 6, pts, wts);

  FaceRule r;
  const int lq = static_cast<int>(pts.size());
  r.points.resize(lq, 3);
  r.weights.resize(lq);
  r.shape.resize(lq, n_sh);
  r.grad.reserve(lq);
  r.face_grad.reserve(lq);
  for (int l = 0; l < lq; ++l) {
    const Eigen::Vector3d xi = fm.origin + pts[l](0) * fm.a + pts[l](1) * fm.b;
    r.points.row(l) = xi;
    r.weights(l) = wts[l];
    r.shape.row(l) = shape(xi);
    auto g = shape_gradient(xi);
    r.grad.push_back(g);
    Eigen::Matrix<double, Eigen::Dynamic, 2> fg(n_sh, 2);
    fg.col(0) = g * fm.a;  // dθ̂/du = ∇̂θ̂ · a
    fg.col(1) = g * fm.b;
    r.face_grad.push_back(fg);
  }
  return r;
}

std::vector<FaceRule> ReferenceElement::all_face_rules(const QuadratureConfig& q) const {
  std::vector<FaceRule> rules;
  rules.reserve(n_faces);
  for (int f = 0; f < n_faces; ++f) rules.push_back(face_rule(f, q));
  return rules;
}

const ReferenceElement& ReferenceElement::get(ElementKind kind) {
  static const ReferenceElement tet = make_tet();
  static const ReferenceElement hex8 = make_hex(8);
  static const ReferenceElement hex20 = make_hex(20);
  switch (kind) {
    case ElementKind::Tet4:
      return tet;
    case ElementKind::Hex8:
      return hex8;
    case ElementKind::Hex20:
      return hex20;
  }
  throw Error("bad kind");
}

}  // namespace lcfgrad
