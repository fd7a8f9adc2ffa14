#include "pmgp/gpr_oracle.hpp"

#include "pmgp/errors.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace pmgp {

namespace {

Eigen::MatrixXd gram(const GPRProblem& prob) {
    const Eigen::Index n = prob.times.size();
    Eigen::MatrixXd K(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            K(i, j) = K(j, i) = spectral_matern_eval(prob.times(i) - prob.times(j), prob.kern);
        }
    }
    K.diagonal().array() += prob.sigma * prob.sigma;
    return K;
}

// Cholesky of the noisy Gram matrix with the statespace jitter levels.
Eigen::LLT<Eigen::MatrixXd> factor(const Eigen::MatrixXd& K) {
    const double scale = K.diagonal().mean();
    for (double eps : std::array<double, 4>{0.0, 1e-12, 1e-10, 1e-8}) {
        Eigen::MatrixXd A = K;
        A.diagonal().array() += eps * scale;
        Eigen::LLT<Eigen::MatrixXd> llt(A);
        if (llt.info() == Eigen::Success) return llt;
    }
    throw ConditioningError("GPR: Gram matrix singular after jitter escalation");
}

Eigen::VectorXd residuals(const GPRProblem& prob) {
    Eigen::VectorXd r(prob.times.size());
    for (Eigen::Index i = 0; i < r.size(); ++i) r(i) = prob.observations(i) - prob.trend(prob.times(i));
    return r;
}

}  // namespace

void GPRProblem::validate() const {
    if (times.size() != observations.size()) throw DimensionError("GPR: times and observations differ in length");
    for (Eigen::Index i = 1; i < times.size(); ++i) {
        if (!(times(i) > times(i - 1))) throw OrderingError("GPR: times must be strictly increasing");
    }
    if (!(sigma > 0.0)) throw DomainError("GPR: sigma must be > 0");
}

double log_marginal_likelihood(const GPRProblem& prob) {
    prob.validate();
    const Eigen::Index n = prob.times.size();
    if (n < 1) throw InputError("GPR: need at least one observation");
    const Eigen::LLT<Eigen::MatrixXd> llt = factor(gram(prob));
    const Eigen::VectorXd alpha = llt.matrixL().solve(residuals(prob));
    const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    return -0.5 * alpha.squaredNorm() - 0.5 * log_det - 0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
}

Predictive posterior(const GPRProblem& prob, double t_star) {
    prob.validate();
    const double prior_var = prob.kern.total_amplitude();
    const double prior_mean = prob.trend(t_star);
    if (prob.times.size() == 0) return Predictive{prior_mean, prior_var, PredictiveKind::latent_forecast};

    const Eigen::LLT<Eigen::MatrixXd> llt = factor(gram(prob));
    Eigen::VectorXd k_star(prob.times.size());
    for (Eigen::Index i = 0; i < k_star.size(); ++i) {
        k_star(i) = spectral_matern_eval(t_star - prob.times(i), prob.kern);
    }
    const Eigen::VectorXd w = llt.matrixL().solve(k_star);
    const Eigen::VectorXd a = llt.matrixL().solve(residuals(prob));
    const double var = std::max(prior_var - w.squaredNorm(), 0.0);
    return Predictive{prior_mean + w.dot(a), var, PredictiveKind::latent_forecast};
}

}  // namespace pmgp
