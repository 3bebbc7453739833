#include "htgd/reference.hpp"

#include <algorithm>
#include <cmath>

#include "htgd/errors.hpp"
#include "htgd/structured_ops.hpp"

namespace htgd::reference {
namespace {

double rel(double num, double den) { return den > 0.0 ? num / den : num; }

Eigen::MatrixXcd masked_y(const Eigen::MatrixXcd& y, const SamplingMask& mask, const ProblemDims& dims) {
  if (y.rows() != dims.length() || y.cols() != dims.L) throw_invalid("reference: observations have the wrong shape");
  return apply_mask(y, mask);
}

}  // namespace

double objective_f_dense(const FactorSetM& z, const Eigen::MatrixXcd& weighted_obs, const SamplingMask& mask,
                         const ProblemDims& dims) {
  const StructuredOps ops(dims.n());
  const Eigen::MatrixXcd y = masked_y(weighted_obs, mask, dims);
  const double p = dims.p();
  const double L = static_cast<double>(dims.L);

  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(dims.n(), dims.n());
  for (Index q = 0; q < dims.L; ++q) c += z.z1(q).conjugate() * z.z1(q).transpose();

  double f = 0.0;
  for (Index l = 0; l < dims.L; ++l) {
    const Eigen::MatrixXcd h = z.z2(l) * z.z1(l).adjoint();
    const Eigen::MatrixXcd gy = ops.apply(Lift::hankel, y.col(l));
    const Eigen::VectorXcd fit = apply_mask(Eigen::VectorXcd(ops.adjoint(Lift::hankel, h - gy)), mask);
    const Eigen::MatrixXcd t = z.z1(l) * z.z1(l).adjoint();
    f += fit.squaredNorm() / (2.0 * p);
    f += 0.5 * (h - reference::project(ops, Lift::hankel, h)).squaredNorm();
    f += 0.25 * (t - reference::project(ops, Lift::toeplitz, t)).squaredNorm();
    f += 0.25 * (c - L * z.z2(l) * z.z2(l).adjoint()).squaredNorm();
  }
  return f;
}

double objective_g_dense(const FactorSetC& z, const Eigen::MatrixXcd& weighted_obs, const SamplingMask& mask,
                         const ProblemDims& dims) {
  const StructuredOps ops(dims.n());
  const Eigen::MatrixXcd y = masked_y(weighted_obs, mask, dims);
  const double p = dims.p();
  const Eigen::MatrixXcd t1 = z.z(0) * z.z(0).adjoint();

  double f = 0.0;
  for (Index l = 0; l < dims.L; ++l) {
    const Eigen::MatrixXcd h = z.z(l) * z.z(l).transpose();
    const Eigen::MatrixXcd gy = ops.apply(Lift::hankel, y.col(l));
    const Eigen::VectorXcd fit = apply_mask(Eigen::VectorXcd(ops.adjoint(Lift::hankel, h - gy)), mask);
    f += fit.squaredNorm() / (4.0 * p);
    f += 0.25 * (h - reference::project(ops, Lift::hankel, h)).squaredNorm();
    if (l > 0) f += 0.25 * (t1 - z.z(l) * z.z(l).adjoint()).squaredNorm();
  }
  f += 0.25 * (t1 - reference::project(ops, Lift::toeplitz, t1)).squaredNorm();
  return f;
}

FactorSetM exact_factors(const SpectralModel& model, const ProblemDims& dims) {
  model.validate();
  if (model.K() != dims.K || model.L() != dims.L) throw_invalid("exact_factors: model and dims disagree");
  const Eigen::MatrixXcd a = steering_matrix(model.freqs, dims.n());
  const Eigen::MatrixXcd s = model.coefficients();
  const Eigen::VectorXd pk = s.rowwise().norm() / std::sqrt(static_cast<double>(dims.L));

  FactorSetM z = FactorSetM::zeros(dims.L, dims.n(), dims.K);
  for (Index l = 0; l < dims.L; ++l) {
    Eigen::VectorXcd d1(dims.K), d2(dims.K);
    for (Index k = 0; k < dims.K; ++k) {
      const std::complex<double> phase = s(k, l) / std::abs(s(k, l));
      d1(k) = std::conj(s(k, l)) * phase / std::sqrt(pk(k));
      d2(k) = std::sqrt(pk(k)) * phase;
    }
    z.z1(l) = a.conjugate() * d1.asDiagonal();
    z.z2(l) = a * d2.asDiagonal();
  }
  return z;
}

FactorSetC exact_factors_ca(const SpectralModel& model, const ProblemDims& dims) {
  model.validate();
  if (!model.is_ca) throw_invalid("exact_factors_ca: model is not constant-amplitude");
  if (model.K() != dims.K || model.L() != dims.L) throw_invalid("exact_factors_ca: model and dims disagree");
  const Eigen::MatrixXcd a = steering_matrix(model.freqs, dims.n());
  FactorSetC z = FactorSetC::zeros(dims.L, dims.n(), dims.K);
  for (Index l = 0; l < dims.L; ++l) {
    Eigen::VectorXcd d(dims.K);
    for (Index k = 0; k < dims.K; ++k) d(k) = std::polar(std::sqrt(model.amps(k, 0)), 0.5 * model.phases(k, l));
    z.z(l) = a * d.asDiagonal();
  }
  return z;
}

ConstraintResiduals constraint_residuals(const FactorSetM& z, const ProblemDims& dims) {
  const StructuredOps ops(dims.n());
  const double L = static_cast<double>(dims.L);
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(dims.n(), dims.n());
  for (Index q = 0; q < dims.L; ++q) c += z.z1(q).conjugate() * z.z1(q).transpose();

  ConstraintResiduals r;
  for (Index l = 0; l < dims.L; ++l) {
    const Eigen::MatrixXcd h = z.z2(l) * z.z1(l).adjoint();
    const Eigen::MatrixXcd t = z.z1(l) * z.z1(l).adjoint();
    r.hankel = std::max(r.hankel, rel((h - project(ops, Lift::hankel, h)).norm(), h.norm()));
    r.toeplitz = std::max(r.toeplitz, rel((t - project(ops, Lift::toeplitz, t)).norm(), t.norm()));
    r.coupling = std::max(r.coupling, rel((c - L * z.z2(l) * z.z2(l).adjoint()).norm(), c.norm()));
  }
  return r;
}

ConstraintResiduals constraint_residuals_ca(const FactorSetC& z, const ProblemDims& dims) {
  const StructuredOps ops(dims.n());
  const Eigen::MatrixXcd t1 = z.z(0) * z.z(0).adjoint();
  ConstraintResiduals r;
  r.toeplitz = rel((t1 - project(ops, Lift::toeplitz, t1)).norm(), t1.norm());
  for (Index l = 0; l < dims.L; ++l) {
    const Eigen::MatrixXcd h = z.z(l) * z.z(l).transpose();
    r.hankel = std::max(r.hankel, rel((h - project(ops, Lift::hankel, h)).norm(), h.norm()));
    r.coupling = std::max(r.coupling, rel((t1 - z.z(l) * z.z(l).adjoint()).norm(), t1.norm()));
  }
  return r;
}

}  // namespace htgd::reference
