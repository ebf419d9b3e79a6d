#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <stdexcept>

namespace containment {

struct SpectraError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotHurwitz : SpectraError {
  using SpectraError::SpectraError;
};
struct GammaOutOfRange : SpectraError {
  using SpectraError::SpectraError;
};

inline Eigen::MatrixXd kron_identity(const Eigen::MatrixXd& M, int N) {
  const auto r = M.rows(), c = M.cols();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(r * N, c * N);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j)
      for (int k = 0; k < N; ++k) out(i * N + k, j * N + k) = M(i, j);
  return out;
}

/// True iff -M is Hurwitz, i.e. every eigenvalue of M has real part > 1e-10.
inline bool hurwitz_check(const Eigen::MatrixXd& M) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(M, false);
  return (es.eigenvalues().real().array() > 1e-10).all();
}

/// Symmetric positive definite P with P L_FF + L_FF^T P = I, plus its
/// spectral extremes. The spectrum of P kron I_N equals that of P, so these
/// scalars serve the stacked system as well.
struct LyapunovCertificate {
  Eigen::MatrixXd P;
  double lambda_max_P = 0.0;
  double lambda_min_P = 0.0;
  double residual = 0.0;
};

/// Solves the Lyapunov identity by the vectorized (Kronecker) linear system
/// and symmetrizes the result. Desk-scale sizes only.
inline LyapunovCertificate solve_lyapunov(const Eigen::MatrixXd& L_ff) {
  if (L_ff.rows() != L_ff.cols())
    throw SpectraError("L_FF must be square");
  if (!hurwitz_check(L_ff))
    throw NotHurwitz("-L_FF is not Hurwitz; Lyapunov equation has no PD solution");
  const int n = static_cast<int>(L_ff.rows());
  // vec(P L + L^T P) = (L^T kron I + I kron L^T) vec(P)
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n * n, n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        // (L^T kron I): block (i,j) = L^T(i,j) * I = L(j,i) * I
        K(i * n + k, j * n + k) += L_ff(j, i);
        // (I kron L^T): block (i,i) = L^T
        K(i * n + j, i * n + k) += L_ff(k, j);
      }
  Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(I.data(), n * n);
  Eigen::VectorXd p = K.partialPivLu().solve(rhs);
  Eigen::MatrixXd P = Eigen::Map<const Eigen::MatrixXd>(p.data(), n, n);
  P = 0.5 * (P + P.transpose()).eval();

  LyapunovCertificate cert;
  cert.P = P;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P);
  cert.lambda_min_P = es.eigenvalues()(0);
  cert.lambda_max_P = es.eigenvalues()(n - 1);
  cert.residual = (P * L_ff + L_ff.transpose() * P - I).norm();
  return cert;
}

inline double min_eigenvalue_sym(const Eigen::MatrixXd& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  return es.eigenvalues()(0);
}

/// Positive definiteness at tolerance 1e-10 relative to the trace.
inline bool positive_definite(const Eigen::MatrixXd& M, double* min_eig = nullptr) {
  const double me = min_eigenvalue_sym(M);
  if (min_eig) *min_eig = me;
  return me > 1e-10 * std::abs(M.trace());
}

/// Strict lower bound on the dynamic-leader feedback gain k:
/// lambda_max(P) / (2 gamma (1 - gamma^2)).
inline double gain_threshold(const LyapunovCertificate& cert, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw GammaOutOfRange("gamma must lie in (0, 1)");
  return cert.lambda_max_P / (2.0 * gamma * (1.0 - gamma * gamma));
}

/// P_bar = [[P, -gP], [-gP, P]] and Q = P_bar F + F^T P_bar =
/// [[k(1-g^2) I, -P], [-P, 2 g P]]; Q is PD exactly when k exceeds the
/// gain threshold.
struct DynamicLeaderCertificate {
  double k = 0.0;
  double gamma = 0.0;
  double k_threshold = 0.0;
  Eigen::MatrixXd P_bar;
  Eigen::MatrixXd Q;
  bool P_bar_positive_definite = false;
  bool Q_positive_definite = false;
  double P_bar_min_eig = 0.0;
  double Q_min_eig = 0.0;
};

inline DynamicLeaderCertificate build_dynamic_certificate(
    const LyapunovCertificate& cert, double k, double gamma) {
  if (!(k > 0.0)) throw SpectraError("k must be positive");
  if (!(gamma > 0.0 && gamma < 1.0))
    throw GammaOutOfRange("gamma must lie in (0, 1)");
  const int n = static_cast<int>(cert.P.rows());
  DynamicLeaderCertificate out;
  out.k = k;
  out.gamma = gamma;
  out.k_threshold = gain_threshold(cert, gamma);
  out.P_bar.setZero(2 * n, 2 * n);
  out.P_bar.topLeftCorner(n, n) = cert.P;
  out.P_bar.bottomRightCorner(n, n) = cert.P;
  out.P_bar.topRightCorner(n, n) = -gamma * cert.P;
  out.P_bar.bottomLeftCorner(n, n) = -gamma * cert.P;
  out.Q.setZero(2 * n, 2 * n);
  out.Q.topLeftCorner(n, n) =
      k * (1.0 - gamma * gamma) * Eigen::MatrixXd::Identity(n, n);
  out.Q.topRightCorner(n, n) = -cert.P;
  out.Q.bottomLeftCorner(n, n) = -cert.P;
  out.Q.bottomRightCorner(n, n) = 2.0 * gamma * cert.P;
  out.P_bar_positive_definite = positive_definite(out.P_bar, &out.P_bar_min_eig);
  out.Q_positive_definite = positive_definite(out.Q, &out.Q_min_eig);
  return out;
}

/// Drift matrix of the stacked delta system:
/// F = [[k L_FF, -I], [gamma k L_FF, 0]] kron I_N.
inline Eigen::MatrixXd build_F_matrix(const Eigen::MatrixXd& L_ff, double k,
                                      double gamma, int N) {
  const int n = static_cast<int>(L_ff.rows());
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  F.topLeftCorner(n, n) = k * L_ff;
  F.topRightCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
  F.bottomLeftCorner(n, n) = gamma * k * L_ff;
  return kron_identity(F, N);
}

/// Solves M X + X M^T = B (Kronecker route). Used for quasi-static noise
/// floors in the verdict rules.
inline Eigen::MatrixXd solve_sylvester_symmetric(const Eigen::MatrixXd& M,
                                                 const Eigen::MatrixXd& B) {
  const int n = static_cast<int>(M.rows());
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n * n, n * n);
  // vec(M X + X M^T) = (I kron M + M kron I) vec(X)
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        K(j * n + i, j * n + k) += M(i, k);  // I kron M
        K(j * n + i, k * n + i) += M(j, k);  // M kron I
      }
  Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(B.data(), n * n);
  Eigen::VectorXd x = K.partialPivLu().solve(rhs);
  Eigen::MatrixXd X = Eigen::Map<const Eigen::MatrixXd>(x.data(), n, n);
  return 0.5 * (X + X.transpose());
}

}  // namespace containment
