#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <nlohmann/json.hpp>

#include "neumax/measures.hpp"

namespace neumax::fem {

struct Mesh {
  std::vector<Eigen::Vector2d> vertices;
  std::vector<std::array<int, 3>> triangles;       // counter-clockwise
  std::vector<std::array<int, 2>> boundary_edges;  // each borders one triangle

  double area() const;
  double max_edge() const;
  /// Checks orientation, index ranges, duplicate vertices, edge connectivity
  /// and the boundary-edge list. Throws InvalidSpec with the first problem.
  void validate() const;
  /// Recomputes boundary_edges from the triangle list.
  void rebuild_boundary();
  Mesh scaled(double t) const;
};

/// Text format: `nv nt nb`, vertex lines `x y`, triangle lines `i j k`
/// (0-based), boundary lines `i j`.
void write_mesh(std::ostream& out, const Mesh& mesh);
Mesh read_mesh(std::istream& in);

enum class DomainKind { Disk, Rectangle, Conformal, TwoDisksNeck };

struct DomainSpec {
  std::string id;
  DomainKind kind = DomainKind::Disk;
  double radius = 1.0;                 // disk
  double a = 1.0, b = 1.0;             // rectangle [0, a] x [0, b]
  std::vector<Complex> coeffs;         // conformal image of the unit disk
  double eps = 0.1, neck_length = 0.2;  // two disks joined by a neck
  std::optional<double> h;             // per-spec mesh size override

  static DomainSpec disk(double radius, std::string id = "disk");
  static DomainSpec rectangle(double a, double b, std::string id = "rectangle");
  static DomainSpec conformal(std::vector<Complex> coeffs, std::string id = "conformal");
  static DomainSpec two_disks_neck(double eps, double neck_length, std::string id = "two_disks_neck");
};

/// Exact area of the domain described by spec.
double exact_area(const DomainSpec& spec);

/// z + sum_{k=2}^{degree} c_k z^k with random c_k scaled so that
/// sum k|c_k| = amplitude < 1 (univalent by the coefficient test).
DomainSpec perturbed_disk(std::uint64_t seed, double amplitude = 0.3, int degree = 5);

/// {"id", "type": disk|rectangle|conformal|two_disks_neck|perturbed_disk, ...}.
DomainSpec spec_from_json(const nlohmann::json& doc);
nlohmann::json spec_to_json(const DomainSpec& spec);
/// Named shorthand used by the command line: disk, square, rectangle,
/// ellipse, two_disks_neck.
DomainSpec spec_from_name(const std::string& name);

Mesh build_mesh(const DomainSpec& spec, double h);

/// Delaunay triangulation (Bowyer-Watson) of a point set. Returns
/// counter-clockwise triangles over the convex hull.
std::vector<std::array<int, 3>> delaunay(const std::vector<Eigen::Vector2d>& points);

struct System {
  Eigen::SparseMatrix<double> stiffness;
  Eigen::SparseMatrix<double> mass;
};

/// P1 stiffness and consistent mass. Throws DegenerateTriangle.
System assemble(const Mesh& mesh);

/// Element matrices of one triangle.
void element_matrices(const Eigen::Vector2d& p0, const Eigen::Vector2d& p1, const Eigen::Vector2d& p2,
                      Eigen::Matrix3d& k, Eigen::Matrix3d& m);

struct SpectralResult {
  std::vector<double> eigenvalues;  // mu_0 .. mu_k ascending
  std::vector<double> residuals;    // |K v - mu M v| / |M v|
  double area = 0.0;
  double h = 0.0;
  int lanczos_steps = 0;

  std::vector<double> products() const;
};

struct EigenOptions {
  double tolerance = 1e-9;
  int max_steps = 800;
  std::uint64_t seed = 0;
};

/// Smallest k + 1 eigenpairs of K v = mu M v by shift-invert Lanczos with
/// full M-orthogonalization. Throws NoConvergence.
SpectralResult neumann_eigs(const Mesh& mesh, int k, const EigenOptions& options = {});
SpectralResult neumann_eigs(const System& system, int k, const EigenOptions& options = {});

nlohmann::json spectral_to_json(const SpectralResult& result);
void spectral_to_csv(std::ostream& out, const SpectralResult& result);

struct CorpusEntry {
  DomainSpec spec;
  double h = 0.0;
  std::optional<SpectralResult> result;
  std::string error;
  double mu1_area = 0.0;
  double mu2_area = 0.0;
  bool szego_ok = false;   // mu1 Area <= mu1(D) pi (1 + tol)
  bool thm_ok = false;     // mu2 Area <= 2 mu1(D) pi (1 + tol)
  bool polya_ok = false;   // mu2 Area <= 8 pi (1 + tol)
};

struct CorpusReport {
  std::vector<CorpusEntry> entries;  // sorted by spec id
  double tolerance = 0.02;
  double szego_bound = 0.0;
  double theorem_bound = 0.0;
  double polya_bound = 0.0;

  bool all_hold() const;
};

/// Meshes and solves every spec; failures are recorded per entry.
CorpusReport verify_corpus(const std::vector<DomainSpec>& specs, double h, double tolerance = 0.02);
nlohmann::json corpus_to_json(const CorpusReport& report);

/// The standard corpus: square, 2x1 rectangle, unit disk, two ellipse-like
/// images and five random perturbed disks.
std::vector<DomainSpec> standard_corpus(std::uint64_t seed = 0);

}  // namespace neumax::fem
