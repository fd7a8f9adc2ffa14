#pragma once

#include "pmgp/kernels.hpp"

#include <Eigen/Dense>

#include <optional>

namespace pmgp {

/// Cross-covariance between x_u = (z_u, ..., z_u^(p)) and x_v for one
/// Matérn component: entry (i, j) = (-1)^j k^(i+j)(u - v).
struct CrossCovMatrix {
    Eigen::MatrixXd entries;
    double u = 0.0;
    double v = 0.0;
};

[[nodiscard]] CrossCovMatrix dgp_cross_cov(double u, double v, const KernelComponent& comp);

/// Elementwise d/d(log l) of dgp_cross_cov(u, v, comp).entries.
[[nodiscard]] Eigen::MatrixXd dgp_cross_cov_dlog_l(double u, double v, const KernelComponent& comp);

/// Which route cholesky_psd took to produce its factor.
enum class FactorPath { cholesky, jittered_cholesky, eigen_clamped };

struct PsdFactor {
    Eigen::MatrixXd L;
    FactorPath path = FactorPath::cholesky;
    double jitter = 0.0;  ///< absolute diagonal jitter added, if any
};

/// Factor L with L L^T = M for symmetric PSD M.
///
/// Tries plain Cholesky, then Cholesky with eps * mean(diag(M)) added for
/// eps in {1e-12, 1e-10, 1e-8}, and finally a symmetric eigendecomposition with
/// negative eigenvalues clamped to zero. Throws ConditioningError if M is
/// materially indefinite, InputError if M is not symmetric.
[[nodiscard]] PsdFactor cholesky_psd(const Eigen::MatrixXd& M);

/// Solves M X = B for symmetric positive definite M through its Cholesky
/// factor, with the same jitter escalation as cholesky_psd. Never inverts M.
[[nodiscard]] Eigen::MatrixXd spd_solve(const Eigen::MatrixXd& M, const Eigen::MatrixXd& B);

/// Per-component transition from time v to time u > v.
struct ComponentTransition {
    Eigen::MatrixXd F;       ///< K_{u,v} K_{v,v}^{-1}
    Eigen::MatrixXd K_cond;  ///< K_{u,u} - K_{u,v} K_{v,v}^{-1} K_{v,u}
    Eigen::MatrixXd L;       ///< L L^T = K_cond
    double dt = 0.0;
    FactorPath factor_path = FactorPath::cholesky;
};

[[nodiscard]] ComponentTransition component_transition(double u, double v, const KernelComponent& comp);

/// Block-diagonal model over the stacked state (cos copy, sin copy) per component.
struct AssembledModel {
    int p = 0;
    Eigen::Index n_components = 0;
    bool initial = false;  ///< prior model: F = 0 and K_cond = K_{t,t} blocks
    double t = 0.0;
    Eigen::MatrixXd F;
    Eigen::MatrixXd K_cond;
    Eigen::MatrixXd L;
    Eigen::VectorXd H;

    [[nodiscard]] Eigen::Index dim() const { return H.size(); }
};

/// State dimension 2(p+1)(n+1) for a kernel with n+1 components.
[[nodiscard]] Eigen::Index state_dimension(const SpectralMaternKernel& kern);

/// H_t: zero except H[2i(p+1)] = cos(omega_i t) and H[(2i+1)(p+1)] = sin(omega_i t).
[[nodiscard]] Eigen::VectorXd measurement_vector(double t, const SpectralMaternKernel& kern);

/// Block-diagonal stationary covariance with two copies of K_{t,t} per component.
[[nodiscard]] Eigen::MatrixXd prior_covariance(const SpectralMaternKernel& kern);

/// Model for the step t_prev -> t. Without t_prev, returns the initial model
/// whose K_cond is the prior covariance. Throws OrderingError unless t > t_prev.
[[nodiscard]] AssembledModel assemble(std::optional<double> t_prev, double t,
                                      const SpectralMaternKernel& kern);

}  // namespace pmgp
