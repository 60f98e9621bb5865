#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "neumax/errors.hpp"
#include "neumax/fem.hpp"

namespace neumax::fem {

namespace {

struct Tri {
  std::array<int, 3> v;
  std::array<int, 3> nbr;  // nbr[i] lies across the edge opposite v[i]
  bool alive = true;
};

double orient(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

// Positive when d lies inside the circumcircle of the ccw triangle abc.
double in_circle(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c,
                 const Eigen::Vector2d& d) {
  const double adx = a.x() - d.x(), ady = a.y() - d.y();
  const double bdx = b.x() - d.x(), bdy = b.y() - d.y();
  const double cdx = c.x() - d.x(), cdy = c.y() - d.y();
  const double ad = adx * adx + ady * ady;
  const double bd = bdx * bdx + bdy * bdy;
  const double cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

}  // namespace

std::vector<std::array<int, 3>> delaunay(const std::vector<Eigen::Vector2d>& input) {
  const int n = static_cast<int>(input.size());
  if (n < 3) throw Error(ErrorKind::InvalidSpec, "delaunay needs at least three points");

  Eigen::Vector2d lo = input[0], hi = input[0];
  for (const auto& p : input) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const Eigen::Vector2d mid = 0.5 * (lo + hi);
  const double span = std::max((hi - lo).maxCoeff(), 1e-12);

  // Work in centered, unit-scaled coordinates; three far vertices enclose everything.
  std::vector<Eigen::Vector2d> pts(n + 3);
  for (int i = 0; i < n; ++i) pts[i] = (input[i] - mid) / span;
  constexpr double kFar = 1e3;
  pts[n] = {-kFar, -kFar};
  pts[n + 1] = {kFar, -kFar};
  pts[n + 2] = {0.0, kFar};

  std::vector<Tri> tris;
  tris.reserve(static_cast<std::size_t>(8) * n);
  tris.push_back({{n, n + 1, n + 2}, {-1, -1, -1}, true});

  std::vector<int> cavity, stack, mark;
  struct BoundaryEdge {
    int a, b, outside;
  };
  std::vector<BoundaryEdge> rim;
  int last = 0;
  int stamp = 0;
  mark.reserve(tris.capacity());

  for (int ip = 0; ip < n; ++ip) {
    const Eigen::Vector2d& p = pts[ip];

    // Visibility walk from the last created triangle.
    int t = last;
    for (int steps = 0;; ++steps) {
      if (steps > 4 * static_cast<int>(tris.size()) + 16) {
        throw Error(ErrorKind::DegenerateTriangle, "point location did not terminate");
      }
      const Tri& tr = tris[t];
      int next = -1;
      for (int i = 0; i < 3; ++i) {
        if (orient(pts[tr.v[(i + 1) % 3]], pts[tr.v[(i + 2) % 3]], p) < 0.0) {
          next = tr.nbr[i];
          break;
        }
      }
      if (next < 0) break;
      t = next;
    }

    // Cavity of triangles whose circumcircle contains p.
    ++stamp;
    mark.resize(tris.size(), 0);
    cavity.clear();
    stack.assign(1, t);
    mark[t] = stamp;
    rim.clear();
    while (!stack.empty()) {
      const int c = stack.back();
      stack.pop_back();
      cavity.push_back(c);
      for (int i = 0; i < 3; ++i) {
        const int nb = tris[c].nbr[i];
        const int a = tris[c].v[(i + 1) % 3];
        const int b = tris[c].v[(i + 2) % 3];
        if (nb >= 0 && mark[nb] == stamp) continue;
        if (nb >= 0) {
          const Tri& o = tris[nb];
          if (in_circle(pts[o.v[0]], pts[o.v[1]], pts[o.v[2]], p) > 0.0) {
            mark[nb] = stamp;
            stack.push_back(nb);
            continue;
          }
        }
        rim.push_back({a, b, nb});
      }
    }

    for (int c : cavity) tris[c].alive = false;

    const int first = static_cast<int>(tris.size());
    for (const auto& e : rim) tris.push_back({{e.a, e.b, ip}, {-1, -1, e.outside}, true});
    // Each new triangle is (a, b, p): edge opposite p is (a, b), opposite a is (b, p),
    // opposite b is (p, a).
    const int count = static_cast<int>(rim.size());
    std::vector<std::pair<int, int>> by_start, by_end;
    by_start.reserve(count);
    by_end.reserve(count);
    for (int k = 0; k < count; ++k) {
      by_start.emplace_back(rim[k].a, first + k);
      by_end.emplace_back(rim[k].b, first + k);
      if (rim[k].outside >= 0) {
        Tri& o = tris[rim[k].outside];
        for (int i = 0; i < 3; ++i) {
          const int oa = o.v[(i + 1) % 3];
          const int ob = o.v[(i + 2) % 3];
          if (oa == rim[k].b && ob == rim[k].a) o.nbr[i] = first + k;
        }
      }
    }
    std::sort(by_start.begin(), by_start.end());
    std::sort(by_end.begin(), by_end.end());
    auto lookup = [](const std::vector<std::pair<int, int>>& table, int key) {
      auto it = std::lower_bound(table.begin(), table.end(), std::make_pair(key, std::numeric_limits<int>::min()));
      return (it != table.end() && it->first == key) ? it->second : -1;
    };
    for (int k = 0; k < count; ++k) {
      Tri& nt = tris[first + k];
      nt.nbr[0] = lookup(by_start, rim[k].b);  // shares edge (b, p)
      nt.nbr[1] = lookup(by_end, rim[k].a);    // shares edge (p, a)
    }
    last = first;
  }

  std::vector<std::array<int, 3>> out;
  for (const auto& tr : tris) {
    if (!tr.alive) continue;
    if (tr.v[0] >= n || tr.v[1] >= n || tr.v[2] >= n) continue;
    out.push_back(tr.v);
  }
  return out;
}

}  // namespace neumax::fem
