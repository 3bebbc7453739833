#include "htgd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "htgd/errors.hpp"
#include "htgd/rng.hpp"

namespace htgd {
namespace {

Eigen::MatrixXcd orthonormal_basis(const Eigen::MatrixXcd& y) {
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(y);
  return qr.householderQ() * Eigen::MatrixXcd::Identity(y.rows(), y.cols());
}

// S with S S^T = c for a symmetric unitary c. Re(c) and Im(c) commute, so a
// generic real combination shares their orthogonal eigenbasis Q and
// Q^T c Q = diag(e^{i theta}); then S = Q diag(e^{i theta / 2}).
Eigen::MatrixXcd symmetric_unitary_sqrt(const Eigen::MatrixXcd& c_in) {
  const Eigen::MatrixXcd c = 0.5 * (c_in + c_in.transpose());
  const Eigen::MatrixXd mix = c.real() + 0.5773502691896258 * c.imag();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (mix + mix.transpose()));
  const Eigen::MatrixXd q = es.eigenvectors();
  const Eigen::MatrixXcd d = q.transpose().cast<std::complex<double>>() * c * q.cast<std::complex<double>>();
  Eigen::MatrixXcd s = q.cast<std::complex<double>>();
  for (Index k = 0; k < s.cols(); ++k) {
    const std::complex<double> dk = d(k, k);
    const double mag = std::abs(dk);
    s.col(k) *= mag > 0.0 ? std::sqrt(dk / mag) : std::complex<double>(1.0);
  }
  return s;
}

}  // namespace

TruncatedSvd thin_svd(const Eigen::MatrixXcd& a) {
  if (!a.allFinite()) throw NumericalFailure("thin_svd: non-finite input");
  constexpr int opts = Eigen::ComputeThinU | Eigen::ComputeThinV;
  {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(a, opts);
    if (svd.info() == Eigen::Success && svd.matrixU().allFinite() && svd.matrixV().allFinite() &&
        svd.singularValues().allFinite())
      return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, opts);
  if (svd.info() != Eigen::Success || !svd.matrixU().allFinite() || !svd.matrixV().allFinite())
    throw NumericalFailure("thin_svd: SVD did not converge");
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

TruncatedSvd truncated_svd(const Eigen::MatrixXcd& a, Index K) {
  if (K < 1 || K > std::min(a.rows(), a.cols())) throw_invalid("truncated_svd: K out of range");
  if (!a.allFinite()) throw NumericalFailure("truncated_svd: non-finite input");
  const TruncatedSvd s = thin_svd(a);
  return {s.U.leftCols(K), s.sigma.head(K), s.V.leftCols(K)};
}

TruncatedSvd hankel_truncated_svd(const StructuredOps& ops, const Eigen::VectorXcd& v, Index K,
                                  std::uint64_t seed, int power_iterations) {
  const Index n = ops.n();
  if (K < 1 || K > n) throw_invalid("hankel_truncated_svd: K out of range");
  if (!v.allFinite()) throw NumericalFailure("hankel_truncated_svd: non-finite input");
  const Index width = std::min<Index>(n, K + 10);

  Rng rng = make_rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXcd omega(n, width);
  for (Index j = 0; j < width; ++j)
    for (Index i = 0; i < n; ++i) omega(i, j) = {gauss(rng), gauss(rng)};

  // G v is complex symmetric, so (G v)^H X = conj((G v) conj(X)).
  auto apply = [&](const Eigen::MatrixXcd& x) { return ops.lift_mul(Lift::hankel, v, x); };
  auto apply_adj = [&](const Eigen::MatrixXcd& x) -> Eigen::MatrixXcd {
    return ops.lift_mul(Lift::hankel, v, x.conjugate()).conjugate();
  };

  Eigen::MatrixXcd q = orthonormal_basis(apply(omega));
  for (int it = 0; it < power_iterations; ++it) {
    q = orthonormal_basis(apply_adj(q));
    q = orthonormal_basis(apply(q));
  }
  const Eigen::MatrixXcd b = apply_adj(q).adjoint();  // width x n, = Q^H A
  const TruncatedSvd s = thin_svd(b);
  return {q * s.U.leftCols(K), s.sigma.head(K), s.V.leftCols(K)};
}

TakagiResult takagi_from_svd(const TruncatedSvd& svd) {
  const Index K = svd.sigma.size();
  TakagiResult out{svd.U, svd.sigma, false};
  if (K == 0) return out;
  const double top = svd.sigma(0);
  if (!(top > 0.0)) return out;  // zero matrix: any orthonormal U works

  const Eigen::MatrixXcd c = svd.U.adjoint() * svd.V.conjugate();
  const double gap_tol = 1e-10 * top;
  const double zero_tol = 1e-14 * top;
  Index start = 0;
  while (start < K) {
    Index end = start + 1;
    while (end < K && svd.sigma(end - 1) - svd.sigma(end) < gap_tol) ++end;
    const Index len = end - start;
    if (svd.sigma(start) > zero_tol) {
      if (len == 1) {
        const std::complex<double> d = c(start, start);
        const double mag = std::abs(d);
        if (mag > 0.0) out.U.col(start) *= std::sqrt(d / mag);
      } else {
        out.clustered = true;
        out.U.middleCols(start, len) = svd.U.middleCols(start, len) * symmetric_unitary_sqrt(c.block(start, start, len, len));
      }
    }
    start = end;
  }
  return out;
}

TakagiResult takagi_truncated(const Eigen::MatrixXcd& a, Index K) {
  if (a.rows() != a.cols()) throw_invalid("takagi_truncated: matrix must be square");
  const double scale = a.norm();
  if ((a - a.transpose()).norm() > 1e-8 * scale) throw_invalid("takagi_truncated: matrix is not complex symmetric");
  return takagi_from_svd(truncated_svd(a, K));
}

}  // namespace htgd
