#pragma once

#include "pmgp/kernels.hpp"
#include "pmgp/statespace.hpp"

#include <Eigen/Dense>

namespace pmgp {

/// Posterior over the stacked state after the last update.
struct FilterState {
    int p = 2;
    HyperParams theta;
    Eigen::VectorXd m;
    Eigen::MatrixXd P;
    double t_last = 0.0;
    long k = 0;  ///< number of updates applied
    bool initialized = false;

    /// Fresh state with zero mean and the prior covariance under theta.
    [[nodiscard]] static FilterState initial(int p, HyperParams theta);

    [[nodiscard]] Eigen::Index dim() const { return m.size(); }
};

enum class PredictiveKind { observation, latent_forecast, latent_filtered };

struct Predictive {
    double mean = 0.0;
    double var = 0.0;
    PredictiveKind kind = PredictiveKind::observation;
};

struct PredictedState {
    Eigen::VectorXd m_minus;
    Eigen::MatrixXd P_minus;
};

/// Everything the prediction step produces at time t under a given theta,
/// with the carried (m, P) of the state held fixed.
struct OneStepMoments {
    AssembledModel model;
    TrendModel trend;
    Eigen::VectorXd m_minus;
    Eigen::MatrixXd P_minus;
    double mean = 0.0;  ///< m(t) + H^T m^-
    double var = 0.0;   ///< v^- = H^T P^- H + sigma^2
    double sigma2 = 0.0;
};

[[nodiscard]] OneStepMoments one_step_moments(const FilterState& state, double t, const HyperParams& theta);

[[nodiscard]] PredictedState predict_state(const FilterState& state, double t);

struct UpdateResult {
    FilterState state;
    Predictive predictive;  ///< one-step observation predictive at t, before the update
};

[[nodiscard]] UpdateResult update(const FilterState& state, double t, double y);

struct Forecast {
    Predictive observation;
    Predictive latent;
};

/// Read-only predictive at t > t_last (prior predictive when uninitialized).
[[nodiscard]] Forecast forecast(const FilterState& state, double t);

/// z_{t_last} | y_{t_0:t_last}; requires an initialized state.
[[nodiscard]] Predictive filtered_latent(const FilterState& state);

[[nodiscard]] double gaussian_logpdf(double y, double mean, double var);

/// log N(y; m(t) + H^T m^-, v^-) with the model built from theta and the
/// state's carried (m, P) held fixed.
[[nodiscard]] double local_loglik(const FilterState& state, double t, double y, const HyperParams& theta);

}  // namespace pmgp
