#include "gaplab/eigensolve.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

namespace gaplab {

namespace {

std::vector<int> cluster_indices(const std::vector<double>& vals) {
  std::vector<int> cluster(vals.size(), 0);
  int group = 0;
  for (size_t i = 1; i < vals.size(); ++i) {
    const double scale = std::max({std::abs(vals[i]), std::abs(vals[i - 1]), 1e-300});
    if (std::abs(vals[i] - vals[i - 1]) > 1e-8 * scale) ++group;
    cluster[i] = group;
  }
  return cluster;
}

}  // namespace

bool Spectrum::has_cluster() const {
  for (size_t i = 1; i < cluster_of.size(); ++i)
    if (cluster_of[i] == cluster_of[i - 1]) return true;
  return false;
}

std::string Spectrum::to_json() const {
  std::string out = "{\"eigenvalues\":[";
  char buf[64];
  for (size_t i = 0; i < eigenvalues.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s%.17g", i ? "," : "", eigenvalues[i]);
    out += buf;
  }
  out += "],\"residuals\":[";
  for (size_t i = 0; i < residuals.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s%.17g", i ? "," : "", residuals[i]);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "],\"h\":%.17g,\"seed\":%llu,\"iterations\":%d}",
                h, static_cast<unsigned long long>(seed), iterations);
  out += buf;
  return out;
}

Spectrum smallest_eigenpairs(const SymPencil& pencil, int k, const SolveOptions& opts) {
  const Eigen::Index n = pencil.dim();
  if (k < 1) throw std::invalid_argument("k must be positive");
  if (k >= n)
    throw std::invalid_argument("k must be smaller than the pencil dimension");
  double sigma = opts.shift.value_or(-1.0);

  // Factor A - sigma*M with sigma strictly below the spectrum; the inertia
  // (negative pivot count) detects a shift inside the spectrum.
  Eigen::SimplicialLDLT<SpMat> ldlt;
  SpMat shifted;
  for (int attempt = 0;; ++attempt) {
    shifted = pencil.A - sigma * pencil.M;
    ldlt.compute(shifted);
    if (ldlt.info() != Eigen::Success) {
      int pivot = -1;
      const auto& d = ldlt.vectorD();
      for (Eigen::Index i = 0; i < d.size(); ++i)
        if (!(d[i] > 0.0) || !std::isfinite(d[i])) {
          pivot = static_cast<int>(i);
          break;
        }
      throw SolverError("sparse factorization failed at pivot " +
                            std::to_string(pivot),
                        pivot);
    }
    int negatives = 0;
    const auto& d = ldlt.vectorD();
    for (Eigen::Index i = 0; i < d.size(); ++i) negatives += d[i] < 0.0;
    if (negatives == 0) break;
    if (attempt >= 60)
      throw SolverError("could not place the shift below the smallest eigenvalue");
    sigma = sigma - std::max(1.0, std::abs(sigma)) * std::pow(2.0, attempt);
  }

  const int b = std::max(2, opts.block_size);
  const int m_max =
      static_cast<int>(std::min<Eigen::Index>(n, std::max(4 * k + 2 * b, 30)));

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto random_block = [&](int cols) {
    Eigen::MatrixXd w(n, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < n; ++i) w(i, j) = gauss(rng);
    return w;
  };

  Eigen::MatrixXd V(n, 0);   // M-orthonormal basis
  Eigen::MatrixXd AV(n, 0);  // A * V, cached for projections and residuals
  Eigen::MatrixXd H(0, 0);   // V' A V

  // M-orthonormalizes W against V and internally. A column wiped out by the
  // projection (relative to its incoming norm) carries no new direction and
  // is replaced by a fresh random one. Gram-Schmidt, two passes.
  auto append_block = [&](Eigen::MatrixXd W) {
    auto sweep = [&](Eigen::VectorXd w, Eigen::Index j) {
      for (int pass = 0; pass < 2; ++pass) {
        if (V.cols() > 0) w -= V * (V.transpose() * (pencil.M * w));
        for (Eigen::Index i = 0; i < j; ++i)
          w -= W.col(i) * (W.col(i).dot(pencil.M * w));
      }
      return w;
    };
    for (Eigen::Index j = 0; j < W.cols(); ++j) {
      double norm0 = std::sqrt(W.col(j).dot(pencil.M * W.col(j)));
      W.col(j) = sweep(W.col(j), j);
      double norm = std::sqrt(W.col(j).dot(pencil.M * W.col(j)));
      int guard = 0;
      while (!(norm > 1e-12 * norm0) && guard++ < 5) {
        Eigen::VectorXd w = random_block(1).col(0);
        norm0 = std::sqrt(w.dot(pencil.M * w));
        w = sweep(std::move(w), j);
        norm = std::sqrt(w.dot(pencil.M * w));
        W.col(j) = w;
      }
      if (!(norm > 0.0)) throw SolverError("orthonormalization broke down");
      W.col(j) /= norm;
    }
    const Eigen::Index m0 = V.cols();
    const Eigen::Index bb = W.cols();
    V.conservativeResize(Eigen::NoChange, m0 + bb);
    V.rightCols(bb) = W;
    AV.conservativeResize(Eigen::NoChange, m0 + bb);
    AV.rightCols(bb) = pencil.A * W;
    H.conservativeResize(m0 + bb, m0 + bb);
    H.block(0, m0, m0, bb) = V.leftCols(m0).transpose() * AV.rightCols(bb);
    H.block(m0, 0, bb, m0) = H.block(0, m0, m0, bb).transpose();
    H.block(m0, m0, bb, bb) = W.transpose() * AV.rightCols(bb);
  };

  append_block(random_block(
      static_cast<int>(std::min<Eigen::Index>(std::max(b, k), n))));

  Spectrum out;
  out.seed = opts.seed;
  int restarts = 0;
  int iterations = 0;
  Eigen::VectorXd ritz;
  Eigen::MatrixXd X;
  std::vector<double> res(k);
  std::vector<int> bad;  // unconverged Ritz indices, worst residual first

  // Component-wise magnitudes, for the evaluation-noise bound below.
  const SpMat absA = pencil.A.cwiseAbs();
  const SpMat absM = pencil.M.cwiseAbs();
  constexpr double kResidualNoise = 32.0 * std::numeric_limits<double>::epsilon();

  auto converged = [&]() {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        0.5 * (H + H.transpose()));
    ritz = es.eigenvalues().head(k);
    X = V * es.eigenvectors().leftCols(k);
    const Eigen::MatrixXd AX = AV * es.eigenvectors().leftCols(k);
    const double ref = std::max(std::abs(ritz[k - 1]), 1e-300);
    bad.clear();
    for (int i = 0; i < k; ++i) {
      const Eigen::VectorXd mx = pencil.M * X.col(i);
      const double mnorm = std::max(mx.norm(), 1e-300);
      res[i] = (AX.col(i) - ritz[i] * mx).norm() / mnorm;
      // Rounding noise in evaluating A*x - theta*M*x. On badly scaled meshes
      // (high-aspect elements) this exceeds tol * theta; below it the
      // residual carries no information, so the pair counts as converged at
      // working precision. Unconverged vectors sit ~1/eps above this bound.
      const Eigen::VectorXd ax = X.col(i).cwiseAbs();
      const double noise = kResidualNoise *
                           ((absA * ax).norm() +
                            std::abs(ritz[i]) * (absM * ax).norm()) /
                           mnorm;
      if (res[i] > std::max(opts.tol * std::max(std::abs(ritz[i]), ref), noise))
        bad.push_back(i);
    }
    std::sort(bad.begin(), bad.end(), [&](int a, int c) { return res[a] > res[c]; });
    return bad.empty();
  };

  // Rayleigh-Ritz with inverse-iteration refinement: every step applies the
  // shifted inverse to the worst unconverged Ritz vectors. Expanding from the
  // newest basis block alone stalls near the orthogonalization noise floor
  // once the head of the spectrum is represented; refining the Ritz vectors
  // themselves keeps contracting their residuals.
  while (!converged()) {
    if (V.cols() == n) {
      // Full space spanned: the Ritz decomposition is exact; accept it.
      break;
    }
    if (V.cols() >= m_max) {
      if (++restarts > opts.max_restarts)
        throw SolverError("eigensolver did not converge within restart budget");
      // Thick restart: keep the best Ritz vectors, drop the rest.
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (H + H.transpose()));
      const int keep = std::min<int>(k + b, static_cast<int>(V.cols()));
      const Eigen::MatrixXd Y = es.eigenvectors().leftCols(keep);
      V = V * Y;
      AV = AV * Y;
      H = es.eigenvalues().head(keep).asDiagonal();
    }
    const int room =
        static_cast<int>(std::min<Eigen::Index>(m_max, n) - V.cols());
    const int take = std::min({static_cast<int>(bad.size()), b, room});
    Eigen::MatrixXd T(n, take);
    for (int j = 0; j < take; ++j) T.col(j) = X.col(bad[j]);
    append_block(ldlt.solve(pencil.M * T));
    ++iterations;
  }

  out.eigenvalues.assign(ritz.data(), ritz.data() + k);
  out.eigenvectors = X;
  // Deterministic sign: largest-magnitude component positive.
  for (int j = 0; j < k; ++j) {
    Eigen::Index idx;
    out.eigenvectors.col(j).cwiseAbs().maxCoeff(&idx);
    if (out.eigenvectors(idx, j) < 0.0) out.eigenvectors.col(j) *= -1.0;
  }
  out.residuals = res;
  out.iterations = iterations;
  out.cluster_of = cluster_indices(out.eigenvalues);
  return out;
}

double rayleigh_quotient(const SymPencil& pencil, std::span<const double> v) {
  if (static_cast<Eigen::Index>(v.size()) != pencil.dim())
    throw std::invalid_argument("vector size does not match pencil");
  Eigen::Map<const Eigen::VectorXd> x(v.data(), v.size());
  const double mm = x.dot(pencil.M * x);
  const double scale = x.squaredNorm();
  if (!(mm > 1e-300 * std::max(scale, 1.0)))
    throw std::invalid_argument("vector has vanishing M-norm");
  return x.dot(pencil.A * x) / mm;
}

double richardson_extrapolate(double coarse, double fine, int order) {
  if (order < 1) throw std::invalid_argument("extrapolation order must be >= 1");
  const double denom = std::pow(2.0, order) - 1.0;
  return fine + (fine - coarse) / denom;
}

}  // namespace gaplab
