#include "htgd/structured_ops.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

#include "htgd/errors.hpp"
#include "htgd/fft.hpp"
#include "htgd/kernels.hpp"

namespace htgd {
namespace {

using CVec = std::vector<std::complex<double>>;

Index half_size(Index len) {
  if (len < 1 || len % 2 == 0) throw_invalid("structured vectors need odd length 2n-1, got " + std::to_string(len));
  return (len + 1) / 2;
}

void require_square(const Eigen::MatrixXcd& m) {
  if (m.rows() != m.cols()) throw_invalid("expected a square matrix");
}

std::span<const std::complex<double>> view(const CVec& v) { return {v.data(), v.size()}; }
std::span<std::complex<double>> view(CVec& v) { return {v.data(), v.size()}; }

// Loads column q of z into a zero-padded buffer, optionally reversed and/or
// conjugated: reversed places z_k at slot n-1-k.
void load_column(const Eigen::MatrixXcd& z, Index q, bool reversed, bool conjugate, CVec& buf) {
  std::fill(buf.begin(), buf.end(), std::complex<double>{});
  const Index n = z.rows();
  for (Index k = 0; k < n; ++k) {
    const std::complex<double> val = conjugate ? std::conj(z(k, q)) : z(k, q);
    buf[static_cast<std::size_t>(reversed ? n - 1 - k : k)] = val;
  }
}

}  // namespace

WeightVector weight_vector(Index N) {
  if (N < 1 || N % 2 == 0) throw_invalid("weight_vector needs odd N >= 1, got " + std::to_string(N));
  WeightVector w;
  w.counts.resize(N);
  for (Index m = 0; m < N; ++m) w.counts(m) = static_cast<double>(std::min(m + 1, N - m));
  w.omega = w.counts.array().sqrt();
  return w;
}

Eigen::MatrixXcd hankel_lift(const Eigen::VectorXcd& x) {
  const Index n = half_size(x.size());
  Eigen::MatrixXcd h(n, n);
  for (Index k = 0; k < n; ++k)
    for (Index j = 0; j < n; ++j) h(j, k) = x(j + k);
  return h;
}

Eigen::MatrixXcd toeplitz_lift(const Eigen::VectorXcd& t) {
  const Index n = half_size(t.size());
  Eigen::MatrixXcd m(n, n);
  for (Index k = 0; k < n; ++k)
    for (Index j = 0; j < n; ++j) m(j, k) = t(n - 1 + j - k);
  return m;
}

Eigen::VectorXcd hankel_adjoint(const Eigen::MatrixXcd& m) {
  require_square(m);
  const Index n = m.rows();
  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(2 * n - 1);
  for (Index k = 0; k < n; ++k)
    for (Index j = 0; j < n; ++j) x(j + k) += m(j, k);
  return x;
}

Eigen::VectorXcd toeplitz_adjoint(const Eigen::MatrixXcd& m) {
  require_square(m);
  const Index n = m.rows();
  Eigen::VectorXcd t = Eigen::VectorXcd::Zero(2 * n - 1);
  for (Index k = 0; k < n; ++k)
    for (Index j = 0; j < n; ++j) t(n - 1 + j - k) += m(j, k);
  return t;
}

double lowrank_frob_sq(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw_invalid("lowrank_frob_sq shape mismatch");
  const Eigen::MatrixXcd ga = a.adjoint() * a;
  const Eigen::MatrixXcd gb = b.adjoint() * b;
  // trace(ga gb) with both Hermitian = sum ga_ij conj(gb_ij).
  return (ga.array() * gb.array().conjugate()).sum().real();
}

StructuredOps::StructuredOps(Index n) : StructuredOps(n, weight_vector(2 * n - 1).omega) {}

StructuredOps::StructuredOps(Index n, Eigen::VectorXd omega)
    : n_(n), omega_(std::move(omega)), fft_size_(conv_fft_size(static_cast<std::size_t>(n))) {
  if (n < 1) throw_invalid("StructuredOps needs n >= 1");
  if (omega_.size() != 2 * n - 1) throw_invalid("weight vector length must be 2n-1");
  if (!(omega_.array() > 0.0).all()) throw_invalid("weights must be positive");
  inv_omega_ = omega_.cwiseInverse();
  adj_scale_ = inv_omega_ / static_cast<double>(fft_size_);
}

Eigen::VectorXcd StructuredOps::unweight(const Eigen::VectorXcd& x) const {
  if (x.size() != length()) throw_invalid("vector length must be 2n-1");
  return x.cwiseProduct(inv_omega_.cast<std::complex<double>>());
}

Eigen::VectorXcd StructuredOps::weight(const Eigen::VectorXcd& x) const {
  if (x.size() != length()) throw_invalid("vector length must be 2n-1");
  return x.cwiseProduct(omega_.cast<std::complex<double>>());
}

Eigen::MatrixXcd StructuredOps::apply(Lift op, const Eigen::VectorXcd& v) const {
  const Eigen::VectorXcd u = unweight(v);
  return op == Lift::hankel ? hankel_lift(u) : toeplitz_lift(u);
}

Eigen::VectorXcd StructuredOps::adjoint(Lift op, const Eigen::MatrixXcd& m) const {
  if (m.rows() != n_ || m.cols() != n_) throw_invalid("adjoint expects an n x n matrix");
  const Eigen::VectorXcd x = op == Lift::hankel ? hankel_adjoint(m) : toeplitz_adjoint(m);
  return x.cwiseProduct(inv_omega_.cast<std::complex<double>>());
}

// Column q of (op v) Z, with u = D^-1 v:
//   Hankel:   sum_k u_{j+k} z_k     = (u * rev(z))_{j+n-1}
//   Toeplitz: sum_k u_{n-1+j-k} z_k = (u * z)_{j+n-1}
// The linear convolution has length 3n-2; with P >= 2n the wrapped tail only
// touches indices below n-1, leaving the needed window intact.
Eigen::MatrixXcd StructuredOps::lift_mul(Lift op, const Eigen::VectorXcd& v, const Eigen::MatrixXcd& z) const {
  if (v.size() != length()) throw_invalid("lift_mul: v must have length 2n-1");
  if (z.rows() != n_) throw_invalid("lift_mul: Z must have n rows");
  const std::size_t P = fft_size_;
  const FftPlan& plan = fft_plan(P);
  const Index N = length();

  CVec buf(P), u_hat(P), z_hat(P), prod(P), out_time(P);
  std::fill(buf.begin(), buf.end(), std::complex<double>{});
  kernels::scale_real({v.data(), static_cast<std::size_t>(N)}, {inv_omega_.data(), static_cast<std::size_t>(N)},
                      {buf.data(), static_cast<std::size_t>(N)});
  plan.forward(buf.data(), u_hat.data());

  const bool reversed = op == Lift::hankel;
  const double inv_p = 1.0 / static_cast<double>(P);
  Eigen::MatrixXcd out(n_, z.cols());
  for (Index q = 0; q < z.cols(); ++q) {
    load_column(z, q, reversed, false, buf);
    plan.forward(buf.data(), z_hat.data());
    kernels::cmul(view(u_hat), view(z_hat), view(prod));
    plan.inverse(prod.data(), out_time.data());
    for (Index j = 0; j < n_; ++j) out(j, q) = out_time[static_cast<std::size_t>(j + n_ - 1)] * inv_p;
  }
  return out;
}

// Entry m of op*(A B^H), before the 1/omega_m factor:
//   Hankel:   sum_q sum_{j+k=m} a_jq conj(b_kq)       = sum_q (a_q * conj(b_q))_m
//   Toeplitz: sum_q sum_{n-1+j-k=m} a_jq conj(b_kq)   = sum_q (a_q * rev(conj(b_q)))_m
// The column sum is taken in the frequency domain so only one inverse FFT runs.
Eigen::VectorXcd StructuredOps::adjoint_lowrank(Lift op, const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) const {
  if (a.rows() != n_ || b.rows() != n_ || a.cols() != b.cols()) throw_invalid("adjoint_lowrank: A and B must both be n x K");
  const std::size_t P = fft_size_;
  const FftPlan& plan = fft_plan(P);
  const Index N = length();

  CVec buf(P), a_hat(P), b_hat(P), acc(P, std::complex<double>{}), time(P);
  const bool reversed = op == Lift::toeplitz;
  for (Index q = 0; q < a.cols(); ++q) {
    load_column(a, q, false, false, buf);
    plan.forward(buf.data(), a_hat.data());
    load_column(b, q, reversed, true, buf);
    plan.forward(buf.data(), b_hat.data());
    kernels::cmul_acc(view(a_hat), view(b_hat), view(acc));
  }
  plan.inverse(acc.data(), time.data());
  Eigen::VectorXcd out(N);
  kernels::scale_real({time.data(), static_cast<std::size_t>(N)}, {adj_scale_.data(), static_cast<std::size_t>(N)},
                      {out.data(), static_cast<std::size_t>(N)});
  return out;
}

namespace reference {

Eigen::MatrixXcd lift_mul(const StructuredOps& ops, Lift op, const Eigen::VectorXcd& v, const Eigen::MatrixXcd& z) {
  return ops.apply(op, v) * z;
}

Eigen::VectorXcd adjoint_lowrank(const StructuredOps& ops, Lift op, const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return ops.adjoint(op, a * b.adjoint());
}

Eigen::MatrixXcd project(const StructuredOps& ops, Lift op, const Eigen::MatrixXcd& m) {
  return ops.apply(op, ops.adjoint(op, m));
}

}  // namespace reference

}  // namespace htgd
