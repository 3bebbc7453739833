#pragma once

// Hankel/Toeplitz lifts between length-N vectors (N = 2n-1) and n x n
// matrices, their weight-normalized forms G = H D^-1 and W = T D^-1, and
// FFT-based products that never form an n x n matrix.
//
// Conventions (0-based): (Hx)_{j,k} = x_{j+k},  (Tt)_{j,k} = t_{n-1+j-k}.
// With a_m = #entries on the m-th (skew-)diagonal and omega = sqrt(a),
// H*H = T*T = diag(a) and G*G = W*W = I.

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace htgd {

using Index = Eigen::Index;

struct WeightVector {
  Eigen::VectorXd counts;  ///< a_m = min(m+1, N-m)
  Eigen::VectorXd omega;   ///< sqrt(a_m)
};

/// Weights for odd N. Throws InvalidArgument for even or non-positive N.
WeightVector weight_vector(Index N);

/// Dense lifts and adjoints. Inputs must satisfy length = 2n-1.
Eigen::MatrixXcd hankel_lift(const Eigen::VectorXcd& x);
Eigen::MatrixXcd toeplitz_lift(const Eigen::VectorXcd& t);
Eigen::VectorXcd hankel_adjoint(const Eigen::MatrixXcd& m);
Eigen::VectorXcd toeplitz_adjoint(const Eigen::MatrixXcd& m);

/// Which normalized lift: G (Hankel) or W (Toeplitz).
enum class Lift { hankel, toeplitz };

/// ||A B^H||_F^2 via trace((A^H A)(B^H B)); O(n K^2).
double lowrank_frob_sq(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

/// Normalized structured operators for a fixed n.
class StructuredOps {
 public:
  explicit StructuredOps(Index n);
  /// Custom weights; exists so self-tests can inject a corrupted D.
  StructuredOps(Index n, Eigen::VectorXd omega);

  Index n() const { return n_; }
  Index length() const { return 2 * n_ - 1; }
  const Eigen::VectorXd& omega() const { return omega_; }
  std::size_t fft_size() const { return fft_size_; }

  // Dense applications (O(n^2)); used for initialization and as oracles.
  Eigen::MatrixXcd apply(Lift op, const Eigen::VectorXcd& v) const;
  Eigen::VectorXcd adjoint(Lift op, const Eigen::MatrixXcd& m) const;

  /// (op v) Z for Z of size n x K, via length-P cyclic convolutions.
  Eigen::MatrixXcd lift_mul(Lift op, const Eigen::VectorXcd& v, const Eigen::MatrixXcd& z) const;

  /// op*(A B^H) for A, B of size n x K, without forming A B^H.
  Eigen::VectorXcd adjoint_lowrank(Lift op, const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) const;

  /// D^-1 x (entrywise division by omega).
  Eigen::VectorXcd unweight(const Eigen::VectorXcd& x) const;
  /// D x.
  Eigen::VectorXcd weight(const Eigen::VectorXcd& x) const;

 private:
  Index n_;
  Eigen::VectorXd omega_;
  Eigen::VectorXd inv_omega_;
  Eigen::VectorXd adj_scale_;  ///< 1 / (omega_m * P) for m < N
  std::size_t fft_size_;
};

namespace reference {

/// Dense oracles for the FFT paths: form the n x n matrices explicitly.
Eigen::MatrixXcd lift_mul(const StructuredOps& ops, Lift op, const Eigen::VectorXcd& v, const Eigen::MatrixXcd& z);
Eigen::VectorXcd adjoint_lowrank(const StructuredOps& ops, Lift op, const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);
/// Orthogonal projection onto the Hankel (op = hankel) or Toeplitz subspace: op op*.
Eigen::MatrixXcd project(const StructuredOps& ops, Lift op, const Eigen::MatrixXcd& m);

}  // namespace reference

}  // namespace htgd
