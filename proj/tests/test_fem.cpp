#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "neumax/errors.hpp"
#include "neumax/fem.hpp"
#include "neumax/specfun.hpp"

using namespace neumax;
using namespace neumax::fem;
using std::numbers::pi;

TEST_CASE("element matrices of the reference triangle") {
  Eigen::Matrix3d k, m;
  element_matrices({0, 0}, {1, 0}, {0, 1}, k, m);
  Eigen::Matrix3d k_ref;
  k_ref << 1, -0.5, -0.5, -0.5, 0.5, 0, -0.5, 0, 0.5;
  Eigen::Matrix3d m_ref;
  m_ref << 2, 1, 1, 1, 2, 1, 1, 1, 2;
  m_ref /= 24.0;
  CHECK((k - k_ref).norm() < 1e-15);
  CHECK((m - m_ref).norm() < 1e-15);
  CHECK_THROWS_AS(element_matrices({0, 0}, {1, 0}, {2, 0}, k, m), Error);
}

TEST_CASE("assembly invariants") {
  const Mesh mesh = build_mesh(DomainSpec::disk(1.0), 0.1);
  mesh.validate();
  const System sys = assemble(mesh);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(sys.stiffness.rows());
  CHECK((sys.stiffness * ones).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(ones.dot(sys.mass * ones) == doctest::Approx(mesh.area()).epsilon(1e-13));
  CHECK(Eigen::SparseMatrix<double>(sys.stiffness - Eigen::SparseMatrix<double>(sys.stiffness.transpose())).norm() <
        1e-14);
}

TEST_CASE("mesh areas") {
  CHECK(build_mesh(DomainSpec::rectangle(1, 1), 0.02).area() == doctest::Approx(1.0).epsilon(1e-12));
  const Mesh disk = build_mesh(DomainSpec::disk(1.0), 0.02);
  CHECK(std::abs(disk.area() - pi) < 1e-3);
  CHECK(disk.max_edge() <= 0.025);
  const DomainSpec neck = DomainSpec::two_disks_neck(0.1, 0.2);
  const Mesh nm = build_mesh(neck, 0.01);
  nm.validate();
  // Two unit disks at distance 2.2 and the strip of width 0.1 between them.
  const double c = 0.05;
  const double exact = 2 * pi + 2 * 1.1 * 0.1 - 2 * (c * std::sqrt(1 - c * c) + std::asin(c));
  CHECK(exact_area(neck) == doctest::Approx(exact).epsilon(1e-14));
  CHECK(std::abs(nm.area() - exact) < 1e-3);
  try {
    build_mesh(DomainSpec::two_disks_neck(0.01, 0.2), 0.02);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NeckTooNarrow);
  }
}

TEST_CASE("delaunay of a square with a center point") {
  const std::vector<Eigen::Vector2d> pts{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}};
  const auto tris = delaunay(pts);
  CHECK(tris.size() == 4);
  double area = 0.0;
  for (const auto& t : tris) {
    const Eigen::Vector2d a = pts[t[1]] - pts[t[0]], b = pts[t[2]] - pts[t[0]];
    const double cross = a.x() * b.y() - a.y() * b.x();
    CHECK(cross > 0.0);
    area += cross / 2;
  }
  CHECK(area == doctest::Approx(1.0));
}

TEST_CASE("mesh io round trip") {
  const Mesh mesh = build_mesh(DomainSpec::rectangle(2, 1), 0.2);
  std::stringstream buf;
  write_mesh(buf, mesh);
  const Mesh back = read_mesh(buf);
  CHECK(back.vertices.size() == mesh.vertices.size());
  CHECK(back.triangles == mesh.triangles);
  CHECK(back.boundary_edges == mesh.boundary_edges);
  CHECK(back.area() == doctest::Approx(mesh.area()).epsilon(1e-15));
  std::stringstream broken("3 1 0\n0 0\n1 0\n");
  CHECK_THROWS_AS(read_mesh(broken), Error);
}

TEST_CASE("separable eigenvalues of rectangles") {
  const SpectralResult sq = neumann_eigs(build_mesh(DomainSpec::rectangle(1, 1), 0.02), 3);
  CHECK(std::abs(sq.eigenvalues[0]) < 1e-8);
  CHECK(sq.eigenvalues[1] == doctest::Approx(pi * pi).epsilon(1e-2));
  CHECK(sq.eigenvalues[2] == doctest::Approx(pi * pi).epsilon(1e-2));
  CHECK(sq.eigenvalues[3] == doctest::Approx(2 * pi * pi).epsilon(1e-2));
  for (double r : sq.residuals) CHECK(r < 1e-9);
  const SpectralResult rect = neumann_eigs(build_mesh(DomainSpec::rectangle(2, 1), 0.02), 2);
  CHECK(rect.products()[2] == doctest::Approx(2 * pi * pi).epsilon(2e-2));
  CHECK(rect.products()[2] < specfun::planar_bound());
}

TEST_CASE("disk eigenvalue and convergence") {
  const double mu = specfun::mu1_disk();
  const SpectralResult coarse = neumann_eigs(build_mesh(DomainSpec::disk(1.0), 0.08), 2);
  const SpectralResult fine = neumann_eigs(build_mesh(DomainSpec::disk(1.0), 0.04), 2);
  CHECK(fine.eigenvalues[1] == doctest::Approx(mu).epsilon(1e-2));
  CHECK(fine.eigenvalues[2] == doctest::Approx(fine.eigenvalues[1]).epsilon(1e-3));
  const double e_coarse = std::abs(coarse.eigenvalues[1] - mu), e_fine = std::abs(fine.eigenvalues[1] - mu);
  CHECK(e_coarse / e_fine >= 3.0);
}

TEST_CASE("scaling a mesh scales eigenvalues by the inverse square") {
  const Mesh mesh = build_mesh(DomainSpec::conformal({1.0, 0.0, 0.15}), 0.08);
  const SpectralResult base = neumann_eigs(mesh, 2);
  const SpectralResult big = neumann_eigs(mesh.scaled(2.0), 2);
  for (int i = 1; i <= 2; ++i) CHECK(big.eigenvalues[i] == doctest::Approx(base.eigenvalues[i] / 4).epsilon(1e-9));
  CHECK(big.products()[2] == doctest::Approx(base.products()[2]).epsilon(1e-9));
}

TEST_CASE("spec json round trip") {
  for (const DomainSpec& s : standard_corpus(3)) {
    const DomainSpec back = spec_from_json(spec_to_json(s));
    CHECK(back.id == s.id);
    CHECK(exact_area(back) == doctest::Approx(exact_area(s)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(spec_from_json(nlohmann::json{{"id", "x"}, {"type", "hexagon"}}), Error);
  const DomainSpec p = perturbed_disk(11);
  double weighted = 0.0;
  for (std::size_t k = 1; k < p.coeffs.size(); ++k) weighted += (k + 1) * std::abs(p.coeffs[k]);
  CHECK(weighted == doctest::Approx(0.3));
}

TEST_CASE("small corpus respects the planar bounds") {
  const CorpusReport rep =
      verify_corpus({DomainSpec::disk(1.0, "b"), DomainSpec::rectangle(2, 1, "a")}, 0.05);
  REQUIRE(rep.entries.size() == 2);
  CHECK(rep.entries[0].spec.id == "a");
  CHECK(rep.all_hold());
  CHECK(corpus_to_json(rep).is_object());
}
