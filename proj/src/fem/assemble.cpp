#include <cmath>
#include <string>
#include <vector>

#include "neumax/errors.hpp"
#include "neumax/fem.hpp"

namespace neumax::fem {

void element_matrices(const Eigen::Vector2d& p0, const Eigen::Vector2d& p1, const Eigen::Vector2d& p2,
                      Eigen::Matrix3d& k, Eigen::Matrix3d& m) {
  const Eigen::Vector2d e1 = p1 - p0;
  const Eigen::Vector2d e2 = p2 - p0;
  const double twice_area = e1.x() * e2.y() - e1.y() * e2.x();
  const double scale = std::max({e1.squaredNorm(), e2.squaredNorm(), (p2 - p1).squaredNorm()});
  if (!(twice_area > 1e-14 * scale)) {
    throw Error(ErrorKind::DegenerateTriangle, "triangle area " + std::to_string(0.5 * twice_area));
  }
  const double area = 0.5 * twice_area;
  // Gradients of barycentric coordinates are rotated opposite edges over 2A.
  Eigen::Matrix<double, 3, 2> grad;
  const std::array<Eigen::Vector2d, 3> p{p0, p1, p2};
  for (int i = 0; i < 3; ++i) {
    const Eigen::Vector2d edge = p[(i + 2) % 3] - p[(i + 1) % 3];
    grad.row(i) << -edge.y() / twice_area, edge.x() / twice_area;
  }
  k = area * grad * grad.transpose();
  m = Eigen::Matrix3d::Constant(area / 12.0);
  m.diagonal().array() = area / 6.0;
}

System assemble(const Mesh& mesh) {
  const auto n = static_cast<Eigen::Index>(mesh.vertices.size());
  std::vector<Eigen::Triplet<double>> kt, mt;
  kt.reserve(9 * mesh.triangles.size());
  mt.reserve(9 * mesh.triangles.size());
  Eigen::Matrix3d k, m;
  for (const auto& t : mesh.triangles) {
    element_matrices(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]], k, m);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        kt.emplace_back(t[i], t[j], k(i, j));
        mt.emplace_back(t[i], t[j], m(i, j));
      }
    }
  }
  System sys;
  sys.stiffness.resize(n, n);
  sys.mass.resize(n, n);
  sys.stiffness.setFromTriplets(kt.begin(), kt.end());
  sys.mass.setFromTriplets(mt.begin(), mt.end());
  return sys;
}

}  // namespace neumax::fem
