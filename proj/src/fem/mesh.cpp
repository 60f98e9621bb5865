#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <set>

#include "neumax/errors.hpp"
#include "neumax/fem.hpp"

namespace neumax::fem {

namespace {

constexpr double kPi = std::numbers::pi;

double signed_area(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
}

std::pair<int, int> edge_key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

}  // namespace

double Mesh::area() const {
  double sum = 0.0;
  for (const auto& t : triangles) sum += signed_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]);
  return sum;
}

double Mesh::max_edge() const {
  double best = 0.0;
  for (const auto& t : triangles) {
    for (int i = 0; i < 3; ++i) best = std::max(best, (vertices[t[i]] - vertices[t[(i + 1) % 3]]).norm());
  }
  return best;
}

void Mesh::rebuild_boundary() {
  std::map<std::pair<int, int>, std::pair<int, std::array<int, 2>>> count;
  for (const auto& t : triangles) {
    for (int i = 0; i < 3; ++i) {
      auto& slot = count[edge_key(t[i], t[(i + 1) % 3])];
      ++slot.first;
      slot.second = {t[i], t[(i + 1) % 3]};
    }
  }
  boundary_edges.clear();
  for (const auto& [key, value] : count) {
    if (value.first == 1) boundary_edges.push_back(value.second);
  }
}

void Mesh::validate() const {
  const int nv = static_cast<int>(vertices.size());
  if (nv < 3 || triangles.empty()) throw Error(ErrorKind::InvalidSpec, "mesh is empty");
  for (const auto& t : triangles) {
    for (int i : t) {
      if (i < 0 || i >= nv) throw Error(ErrorKind::InvalidSpec, "triangle index out of range");
    }
    if (!(signed_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]) > 0.0)) {
      throw Error(ErrorKind::InvalidSpec, "triangle not positively oriented");
    }
  }
  std::vector<int> order(nv);
  for (int i = 0; i < nv; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return vertices[a].x() < vertices[b].x() || (vertices[a].x() == vertices[b].x() && vertices[a].y() < vertices[b].y());
  });
  for (int i = 0; i < nv; ++i) {
    for (int j = i + 1; j < nv && vertices[order[j]].x() - vertices[order[i]].x() <= 1e-12; ++j) {
      if ((vertices[order[j]] - vertices[order[i]]).norm() <= 1e-12) {
        throw Error(ErrorKind::InvalidSpec, "duplicate vertices");
      }
    }
  }

  std::map<std::pair<int, int>, std::vector<int>> edges;
  for (int k = 0; k < static_cast<int>(triangles.size()); ++k) {
    const auto& t = triangles[k];
    for (int i = 0; i < 3; ++i) edges[edge_key(t[i], t[(i + 1) % 3])].push_back(k);
  }
  std::set<std::pair<int, int>> boundary;
  for (const auto& [key, owners] : edges) {
    if (owners.size() > 2) throw Error(ErrorKind::InvalidSpec, "edge shared by more than two triangles");
    if (owners.size() == 1) boundary.insert(key);
  }
  std::set<std::pair<int, int>> listed;
  for (const auto& e : boundary_edges) listed.insert(edge_key(e[0], e[1]));
  if (listed != boundary) throw Error(ErrorKind::InvalidSpec, "boundary edge list does not match triangles");

  // Edge connectivity by flood fill over shared edges.
  std::vector<std::vector<int>> adj(triangles.size());
  for (const auto& [key, owners] : edges) {
    if (owners.size() == 2) {
      adj[owners[0]].push_back(owners[1]);
      adj[owners[1]].push_back(owners[0]);
    }
  }
  std::vector<char> seen(triangles.size(), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  std::size_t reached = 0;
  while (!stack.empty()) {
    const int k = stack.back();
    stack.pop_back();
    ++reached;
    for (int nb : adj[k]) {
      if (!seen[nb]) {
        seen[nb] = 1;
        stack.push_back(nb);
      }
    }
  }
  if (reached != triangles.size()) throw Error(ErrorKind::InvalidSpec, "mesh is not edge-connected");
}

Mesh Mesh::scaled(double t) const {
  Mesh out = *this;
  for (auto& v : out.vertices) v *= t;
  return out;
}

void write_mesh(std::ostream& out, const Mesh& mesh) {
  out.precision(17);
  out << mesh.vertices.size() << ' ' << mesh.triangles.size() << ' ' << mesh.boundary_edges.size() << '\n';
  for (const auto& v : mesh.vertices) out << v.x() << ' ' << v.y() << '\n';
  for (const auto& t : mesh.triangles) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (const auto& e : mesh.boundary_edges) out << e[0] << ' ' << e[1] << '\n';
}

Mesh read_mesh(std::istream& in) {
  std::size_t nv = 0, nt = 0, nb = 0;
  if (!(in >> nv >> nt >> nb)) throw Error(ErrorKind::Io, "bad mesh header");
  Mesh mesh;
  mesh.vertices.resize(nv);
  mesh.triangles.resize(nt);
  mesh.boundary_edges.resize(nb);
  for (auto& v : mesh.vertices) in >> v.x() >> v.y();
  for (auto& t : mesh.triangles) in >> t[0] >> t[1] >> t[2];
  for (auto& e : mesh.boundary_edges) in >> e[0] >> e[1];
  if (!in) throw Error(ErrorKind::Io, "truncated mesh file");
  return mesh;
}

// ---------------------------------------------------------------------------
// Domain specs

DomainSpec DomainSpec::disk(double radius, std::string id) {
  DomainSpec s;
  s.id = std::move(id);
  s.kind = DomainKind::Disk;
  s.radius = radius;
  return s;
}

DomainSpec DomainSpec::rectangle(double a, double b, std::string id) {
  DomainSpec s;
  s.id = std::move(id);
  s.kind = DomainKind::Rectangle;
  s.a = a;
  s.b = b;
  return s;
}

DomainSpec DomainSpec::conformal(std::vector<Complex> coeffs, std::string id) {
  DomainSpec s;
  s.id = std::move(id);
  s.kind = DomainKind::Conformal;
  s.coeffs = std::move(coeffs);
  return s;
}

DomainSpec DomainSpec::two_disks_neck(double eps, double neck_length, std::string id) {
  DomainSpec s;
  s.id = std::move(id);
  s.kind = DomainKind::TwoDisksNeck;
  s.eps = eps;
  s.neck_length = neck_length;
  return s;
}

double exact_area(const DomainSpec& spec) {
  switch (spec.kind) {
    case DomainKind::Disk:
      return kPi * spec.radius * spec.radius;
    case DomainKind::Rectangle:
      return spec.a * spec.b;
    case DomainKind::Conformal:
      return ConformalDomain(spec.coeffs).area();
    case DomainKind::TwoDisksNeck: {
      const double c = 0.5 * spec.eps;
      const double delta = 0.5 * spec.neck_length;
      // Strip |y| < c between the centers, minus the parts already inside the disks.
      return 2.0 * kPi + 2.0 * (1.0 + delta) * spec.eps - 2.0 * (c * std::sqrt(1.0 - c * c) + std::asin(c));
    }
  }
  return 0.0;
}

DomainSpec perturbed_disk(std::uint64_t seed, double amplitude, int degree) {
  if (!(amplitude >= 0.0 && amplitude < 1.0) || degree < 2) {
    throw Error(ErrorKind::InvalidSpec, "perturbed disk needs 0 <= amplitude < 1 and degree >= 2");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<Complex> coeffs{1.0};
  double weight = 0.0;
  for (int k = 2; k <= degree; ++k) {
    coeffs.emplace_back(normal(rng), normal(rng));
    weight += k * std::abs(coeffs.back());
  }
  for (std::size_t k = 1; k < coeffs.size(); ++k) coeffs[k] *= amplitude / weight;
  return DomainSpec::conformal(std::move(coeffs), "perturbed_" + std::to_string(seed));
}

namespace {

std::vector<Complex> coeffs_from_json(const nlohmann::json& arr) {
  std::vector<Complex> out;
  for (const auto& c : arr) {
    if (c.is_number()) {
      out.emplace_back(c.get<double>(), 0.0);
    } else if (c.is_array() && c.size() == 2) {
      out.emplace_back(c[0].get<double>(), c[1].get<double>());
    } else {
      throw Error(ErrorKind::InvalidSpec, "coefficient must be a number or [re, im]");
    }
  }
  return out;
}

}  // namespace

DomainSpec spec_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("type")) throw Error(ErrorKind::InvalidSpec, "spec needs a type");
  const std::string type = doc.at("type").get<std::string>();
  const std::string id = doc.value("id", type);
  DomainSpec spec;
  try {
    if (type == "disk") {
      spec = DomainSpec::disk(doc.value("radius", 1.0), id);
    } else if (type == "rectangle") {
      spec = DomainSpec::rectangle(doc.value("a", 1.0), doc.value("b", 1.0), id);
    } else if (type == "conformal") {
      spec = DomainSpec::conformal(coeffs_from_json(doc.at("coeffs")), id);
    } else if (type == "two_disks_neck") {
      spec = DomainSpec::two_disks_neck(doc.at("eps").get<double>(), doc.value("neck_length", 0.2), id);
    } else if (type == "perturbed_disk") {
      spec = perturbed_disk(doc.value("seed", std::uint64_t{0}), doc.value("amplitude", 0.3), doc.value("degree", 5));
      if (doc.contains("id")) spec.id = id;
    } else {
      throw Error(ErrorKind::InvalidSpec, "unknown domain type '" + type + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidSpec, e.what());
  }
  if (doc.contains("h")) spec.h = doc.at("h").get<double>();
  return spec;
}

nlohmann::json spec_to_json(const DomainSpec& spec) {
  nlohmann::json doc{{"id", spec.id}};
  switch (spec.kind) {
    case DomainKind::Disk:
      doc["type"] = "disk";
      doc["radius"] = spec.radius;
      break;
    case DomainKind::Rectangle:
      doc["type"] = "rectangle";
      doc["a"] = spec.a;
      doc["b"] = spec.b;
      break;
    case DomainKind::Conformal: {
      doc["type"] = "conformal";
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& c : spec.coeffs) arr.push_back({c.real(), c.imag()});
      doc["coeffs"] = arr;
      break;
    }
    case DomainKind::TwoDisksNeck:
      doc["type"] = "two_disks_neck";
      doc["eps"] = spec.eps;
      doc["neck_length"] = spec.neck_length;
      break;
  }
  if (spec.h) doc["h"] = *spec.h;
  return doc;
}

DomainSpec spec_from_name(const std::string& name) {
  if (name == "disk") return DomainSpec::disk(1.0, "disk");
  if (name == "square") return DomainSpec::rectangle(1.0, 1.0, "square");
  if (name == "rectangle") return DomainSpec::rectangle(2.0, 1.0, "rectangle_2x1");
  if (name == "ellipse") return DomainSpec::conformal({1.0, 0.0, 0.15}, "ellipse");
  if (name == "two_disks_neck") return DomainSpec::two_disks_neck(0.1, 0.2);
  throw Error(ErrorKind::InvalidSpec, "unknown domain name '" + name + "'");
}

// ---------------------------------------------------------------------------
// Mesh builders

namespace {

Mesh rectangle_mesh(double a, double b, double h) {
  // Criss-cross cells: diagonals are the longest edges, so cell sides are h / sqrt 2.
  const int nx = std::max(1, static_cast<int>(std::ceil(a * std::sqrt(2.0) / h)));
  const int ny = std::max(1, static_cast<int>(std::ceil(b * std::sqrt(2.0) / h)));
  Mesh mesh;
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) mesh.vertices.emplace_back(a * i / nx, b * j / ny);
  }
  auto id = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int v00 = id(i, j), v10 = id(i + 1, j), v01 = id(i, j + 1), v11 = id(i + 1, j + 1);
      if ((i + j) % 2 == 0) {
        mesh.triangles.push_back({v00, v10, v11});
        mesh.triangles.push_back({v00, v11, v01});
      } else {
        mesh.triangles.push_back({v00, v10, v01});
        mesh.triangles.push_back({v10, v11, v01});
      }
    }
  }
  mesh.rebuild_boundary();
  return mesh;
}

// Concentric rings with 6k vertices on ring k; boundary vertices lie on the circle.
Mesh disk_mesh(double radius, double h) {
  const int rings = std::max(2, static_cast<int>(std::ceil(1.5 * radius / h)));
  Mesh mesh;
  mesh.vertices.emplace_back(0.0, 0.0);
  std::vector<int> prev{0};
  for (int k = 1; k <= rings; ++k) {
    const int count = 6 * k;
    const double r = radius * k / rings;
    std::vector<int> ring(count);
    for (int j = 0; j < count; ++j) {
      ring[j] = static_cast<int>(mesh.vertices.size());
      const double t = 2.0 * kPi * j / count;
      mesh.vertices.emplace_back(r * std::cos(t), r * std::sin(t));
    }
    if (prev.size() == 1) {
      for (int j = 0; j < count; ++j) mesh.triangles.push_back({0, ring[j], ring[(j + 1) % count]});
    } else {
      const int m = static_cast<int>(prev.size());
      int i = 0, j = 0;
      while (i < m || j < count) {
        const double next_inner = static_cast<double>(i + 1) / m;
        const double next_outer = static_cast<double>(j + 1) / count;
        if (j < count && (i >= m || next_outer <= next_inner)) {
          mesh.triangles.push_back({prev[i % m], ring[j], ring[(j + 1) % count]});
          ++j;
        } else {
          mesh.triangles.push_back({prev[i % m], ring[j % count], prev[(i + 1) % m]});
          ++i;
        }
      }
    }
    prev = std::move(ring);
  }
  mesh.rebuild_boundary();
  return mesh;
}

Mesh conformal_mesh(const std::vector<Complex>& coeffs, double h) {
  const ConformalDomain domain(coeffs);
  const double stretch = domain.max_boundary_stretch();
  Mesh mesh = disk_mesh(1.0, h / stretch);
  for (auto& v : mesh.vertices) {
    const Complex w = domain.map({v.x(), v.y()});
    v = {w.real(), w.imag()};
  }
  return mesh;
}

// Two unit disks centered at (+-(1 + delta), 0) joined by the strip |y| <= eps / 2.
class TwoDisks {
 public:
  TwoDisks(double eps, double neck_length)
      : c_(0.5 * eps), center_(1.0 + 0.5 * neck_length), alpha_(std::asin(0.5 * eps)),
        x_join_(center_ - std::sqrt(1.0 - c_ * c_)) {}

  bool inside(const Eigen::Vector2d& p) const {
    if ((p - Eigen::Vector2d(-center_, 0.0)).norm() < 1.0) return true;
    if ((p - Eigen::Vector2d(center_, 0.0)).norm() < 1.0) return true;
    return std::abs(p.y()) < c_ && std::abs(p.x()) < center_;
  }

  double boundary_distance(const Eigen::Vector2d& p) const {
    double best = std::numeric_limits<double>::infinity();
    for (int side = -1; side <= 1; side += 2) {
      const Eigen::Vector2d center(side * center_, 0.0);
      const Eigen::Vector2d d = p - center;
      // Excluded arc faces the other disk.
      const double angle = std::atan2(d.y(), -side * d.x());
      if (std::abs(angle) >= alpha_) {
        best = std::min(best, std::abs(d.norm() - 1.0));
      } else {
        for (int s = -1; s <= 1; s += 2) {
          const Eigen::Vector2d end(side * x_join_, s * c_);
          best = std::min(best, (p - end).norm());
        }
      }
    }
    for (int s = -1; s <= 1; s += 2) {
      const double x = std::clamp(p.x(), -x_join_, x_join_);
      best = std::min(best, (p - Eigen::Vector2d(x, s * c_)).norm());
    }
    return best;
  }

  std::vector<Eigen::Vector2d> boundary_points(double spacing) const {
    std::vector<Eigen::Vector2d> out;
    for (int side = -1; side <= 1; side += 2) {
      const double sweep = 2.0 * kPi - 2.0 * alpha_;
      const int n = std::max(8, static_cast<int>(std::ceil(sweep / spacing)));
      // Angle measured from the outward axis so the arc runs away from the neck.
      for (int j = 0; j <= n; ++j) {
        const double t = alpha_ + sweep * j / n;
        const double x = side * center_ - side * std::cos(t);
        out.emplace_back(x, std::sin(t));
      }
    }
    for (int s = -1; s <= 1; s += 2) {
      const int n = std::max(1, static_cast<int>(std::ceil(2.0 * x_join_ / spacing)));
      for (int j = 1; j < n; ++j) out.emplace_back(-x_join_ + 2.0 * x_join_ * j / n, s * c_);
    }
    return out;
  }

  Eigen::Vector2d lower() const { return {-center_ - 1.0, -1.0}; }
  Eigen::Vector2d upper() const { return {center_ + 1.0, 1.0}; }

 private:
  double c_;
  double center_;
  double alpha_;
  double x_join_;
};

Mesh two_disks_mesh(double eps, double neck_length, double h) {
  if (!(eps > 0.0 && eps < 2.0 && neck_length >= 0.0)) {
    throw Error(ErrorKind::InvalidSpec, "two_disks_neck needs 0 < eps < 2 and neck_length >= 0");
  }
  if (eps < 4.0 * h) {
    throw Error(ErrorKind::NeckTooNarrow,
                "neck width " + std::to_string(eps) + " is below 4h = " + std::to_string(4.0 * h));
  }
  const TwoDisks shape(eps, neck_length);
  const double spacing = 0.62 * h;
  std::vector<Eigen::Vector2d> points = shape.boundary_points(spacing);
  const std::size_t n_boundary = points.size();

  // Interior points on a triangular lattice, kept away from the boundary.
  const Eigen::Vector2d lo = shape.lower(), hi = shape.upper();
  const double dy = spacing * std::sqrt(3.0) / 2.0;
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> jitter(-1e-9 * spacing, 1e-9 * spacing);
  int row = 0;
  for (double y = lo.y(); y <= hi.y(); y += dy, ++row) {
    const double shift = (row % 2) ? 0.5 * spacing : 0.0;
    for (double x = lo.x() + shift; x <= hi.x(); x += spacing) {
      const Eigen::Vector2d p(x + jitter(rng), y + jitter(rng));
      if (shape.inside(p) && shape.boundary_distance(p) > 0.4 * spacing) points.push_back(p);
    }
  }
  for (std::size_t i = 0; i < n_boundary; ++i) points[i] += Eigen::Vector2d(jitter(rng), jitter(rng));

  const auto tris = delaunay(points);
  Mesh mesh;
  std::vector<int> remap(points.size(), -1);
  for (const auto& t : tris) {
    const Eigen::Vector2d centroid = (points[t[0]] + points[t[1]] + points[t[2]]) / 3.0;
    if (!shape.inside(centroid)) continue;
    std::array<int, 3> local{};
    for (int i = 0; i < 3; ++i) {
      if (remap[t[i]] < 0) {
        remap[t[i]] = static_cast<int>(mesh.vertices.size());
        mesh.vertices.push_back(points[t[i]]);
      }
      local[i] = remap[t[i]];
    }
    mesh.triangles.push_back(local);
  }
  mesh.rebuild_boundary();
  return mesh;
}

}  // namespace

Mesh build_mesh(const DomainSpec& spec, double h) {
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidSpec, "mesh size must be positive");
  Mesh mesh;
  switch (spec.kind) {
    case DomainKind::Disk:
      if (!(spec.radius > 0.0)) throw Error(ErrorKind::InvalidSpec, "disk radius must be positive");
      mesh = disk_mesh(spec.radius, h);
      break;
    case DomainKind::Rectangle:
      if (!(spec.a > 0.0 && spec.b > 0.0)) throw Error(ErrorKind::InvalidSpec, "rectangle sides must be positive");
      mesh = rectangle_mesh(spec.a, spec.b, h);
      break;
    case DomainKind::Conformal:
      try {
        mesh = conformal_mesh(spec.coeffs, h);
      } catch (const Error& e) {
        throw Error(ErrorKind::InvalidSpec, e.what());
      }
      break;
    case DomainKind::TwoDisksNeck:
      mesh = two_disks_mesh(spec.eps, spec.neck_length, h);
      break;
  }
  mesh.validate();
  return mesh;
}

}  // namespace neumax::fem
