#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <Eigen/SparseCholesky>

#include "neumax/errors.hpp"
#include "neumax/fem.hpp"

namespace neumax::fem {

namespace {

constexpr int kBlock = 3;  // catches eigenvalues of multiplicity up to three

}  // namespace

SpectralResult neumann_eigs(const Mesh& mesh, int k, const EigenOptions& options) {
  SpectralResult out = neumann_eigs(assemble(mesh), k, options);
  out.area = mesh.area();
  out.h = mesh.max_edge();
  return out;
}

// Block shift-invert Lanczos in the M inner product with full
// reorthogonalization and Rayleigh-Ritz on the whole basis.
SpectralResult neumann_eigs(const System& sys, int k, const EigenOptions& options) {
  if (k < 2) throw Error(ErrorKind::InvalidArgument, "neumann_eigs needs k >= 2");
  const Eigen::SparseMatrix<double>& K = sys.stiffness;
  const Eigen::SparseMatrix<double>& M = sys.mass;
  const Eigen::Index n = K.rows();
  const int wanted = k + 1;
  if (n < wanted + kBlock) throw Error(ErrorKind::InvalidArgument, "mesh too small for the requested eigenvalues");

  const double trace_scale = K.diagonal().sum() / M.diagonal().sum();
  const double sigma = -1e-8 * trace_scale;
  Eigen::SparseMatrix<double> A = K - sigma * M;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::NoConvergence, "factorization of K - sigma M failed");

  const int max_dim = static_cast<int>(std::min<Eigen::Index>(options.max_steps, n));
  Eigen::MatrixXd V(n, max_dim);   // M-orthonormal basis
  Eigen::MatrixXd SV(n, max_dim);  // A^{-1} M V
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);

  auto m_orthonormalize = [&](Eigen::MatrixXd& W, int used) {
    for (int pass = 0; pass < 2; ++pass) {
      if (used > 0) {
        const Eigen::MatrixXd MW = M * W;
        W -= V.leftCols(used) * (V.leftCols(used).transpose() * MW);
      }
    }
    // Column-wise Gram-Schmidt in the M inner product; refill collapsed columns.
    for (Eigen::Index c = 0; c < W.cols(); ++c) {
      for (int attempt = 0; attempt < 3; ++attempt) {
        const double before = std::sqrt(W.col(c).dot(M * W.col(c)));
        for (int pass = 0; pass < 2; ++pass) {
          const Eigen::VectorXd mw = M * W.col(c);
          if (used > 0) W.col(c) -= V.leftCols(used) * (V.leftCols(used).transpose() * mw);
          for (Eigen::Index d = 0; d < c; ++d) W.col(c) -= W.col(d) * W.col(d).dot(mw);
        }
        const double norm = std::sqrt(W.col(c).dot(M * W.col(c)));
        if (norm > 1e-10 * std::max(before, 1e-300)) {
          W.col(c) /= norm;
          break;
        }
        for (Eigen::Index i = 0; i < n; ++i) W(i, c) = uniform(rng);
      }
    }
  };

  Eigen::MatrixXd block(n, kBlock);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int c = 0; c < kBlock; ++c) block(i, c) = uniform(rng);
  }
  // One smoothing solve so the basis carries no raw high-frequency noise.
  for (int c = 0; c < kBlock; ++c) block.col(c) = solver.solve(M * block.col(c));
  m_orthonormalize(block, 0);

  SpectralResult out;
  int used = 0;
  double worst = 0.0;
  while (used + kBlock <= max_dim) {
    V.middleCols(used, kBlock) = block;
    for (int c = 0; c < kBlock; ++c) SV.col(used + c) = solver.solve(M * block.col(c));
    used += kBlock;

    if (used >= 2 * wanted + kBlock) {
      const Eigen::MatrixXd MSV = M * SV.leftCols(used);
      Eigen::MatrixXd H = V.leftCols(used).transpose() * MSV;
      H = 0.5 * (H + H.transpose()).eval();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H);
      // Largest theta correspond to the smallest mu = sigma + 1 / theta.
      Eigen::VectorXd mu(wanted);
      Eigen::VectorXd res(wanted);
      worst = 0.0;
      for (int j = 0; j < wanted; ++j) {
        // A single inverse-iteration step damps what Rayleigh-Ritz leaves in high modes.
        const Eigen::VectorXd y = solver.solve(M * (V.leftCols(used) * eig.eigenvectors().col(used - 1 - j)));
        const Eigen::VectorXd My = M * y;
        const Eigen::VectorXd Ky = K * y;
        mu(j) = y.dot(Ky) / y.dot(My);
        res(j) = (Ky - mu(j) * My).norm() / My.norm();
        worst = std::max(worst, res(j));
      }
      if (worst < options.tolerance) {
        std::vector<std::pair<double, double>> pairs;
        for (int j = 0; j < wanted; ++j) pairs.emplace_back(mu(j), res(j));
        std::sort(pairs.begin(), pairs.end());
        for (const auto& [m, r] : pairs) {
          out.eigenvalues.push_back(m);
          out.residuals.push_back(r);
        }
        out.lanczos_steps = used / kBlock;
        return out;
      }
    }
    if (used + kBlock > max_dim) break;
    block = SV.middleCols(used - kBlock, kBlock);
    m_orthonormalize(block, used);
  }
  throw Error(ErrorKind::NoConvergence, "shift-invert Lanczos stopped at basis size " + std::to_string(used) +
                                            " with worst residual " + std::to_string(worst));
}

}  // namespace neumax::fem
