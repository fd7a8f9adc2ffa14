#pragma once

#include "pmgp/filter.hpp"
#include "pmgp/kernels.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace pmgp {

/// Coordinates in which the PA step treats the frequencies. The stored
/// hyperparameters always hold log omega.
enum class OmegaSpace { log, raw };

[[nodiscard]] std::string to_string(OmegaSpace s);
[[nodiscard]] OmegaSpace parse_omega_space(const std::string& name);

struct PAConfig {
    double c = 100.0;               ///< normalized aggressiveness
    double eps = 0.0;               ///< tolerance on the local log-likelihood
    double theta_norm_floor = 1.0;  ///< lower bound on ||theta||^2 inside c_k
    OmegaSpace omega_space = OmegaSpace::log;

    void validate() const;
};

/// Gradient of the local log-likelihood w.r.t. the flat hyperparameter vector,
/// with the carried filter state held constant.
struct GradientBundle {
    Eigen::VectorXd dmean;  ///< d mbar / d theta
    Eigen::VectorXd dvar;   ///< d vbar / d theta
    Eigen::VectorXd grad;   ///< d L / d theta
    double loglik = 0.0;
    double mean = 0.0;
    double var = 0.0;
};

[[nodiscard]] GradientBundle grad_local_loglik(const FilterState& state, double t, double y,
                                               const HyperParams& theta);

/// c_k = c * max(||theta||^2, floor) / (eps + L)^2.
[[nodiscard]] double aggressiveness(const Eigen::VectorXd& theta, double loglik, const PAConfig& cfg);

/// Closed-form step for a given c_k:
/// theta + c_k max(-eps - L, 0) / (1 + c_k ||grad||^2) * grad.
/// Returns theta unchanged (bitwise) on the passive branch L >= -eps.
[[nodiscard]] Eigen::VectorXd pa_step(const Eigen::VectorXd& theta, double loglik,
                                      const Eigen::VectorXd& grad, double eps, double c_k);

/// Passive-aggressive hyperparameter update with c_k from aggressiveness().
/// `grad` is w.r.t. the flat (log omega) vector; with OmegaSpace::raw the step
/// is taken in omega instead and a non-positive frequency rejects the update.
/// Non-finite inputs throw InputError; a non-finite result is rejected and
/// theta_prev returned.
[[nodiscard]] HyperParams pa_update(const HyperParams& theta_prev, double loglik,
                                    const Eigen::VectorXd& grad, const PAConfig& cfg);

/// Default initialization: omega_i = (1+i)/(1+n) pi F_s stored as log omega,
/// every other flat coordinate 0.
[[nodiscard]] HyperParams initial_hyperparams(TrendKind trend, int n_components, double sampling_frequency);

struct ThetaTraceEntry {
    long k = 0;
    double t = 0.0;
    bool updated = false;
    Eigen::VectorXd theta;
};

struct StepResult {
    Predictive predictive;           ///< one-step observation predictive at t under theta_{t_k}
    Predictive previous_predictive;  ///< same, under theta_{t_{k-1}} (before seeing y)
    double loglik = 0.0;             ///< local log-likelihood at theta_{t_{k-1}}
    bool theta_updated = false;
};

/// Online forecaster: PA hyperparameter learning followed by the exact
/// prediction and update steps, one observation at a time.
class PmgpForecaster {
public:
    PmgpForecaster(int p, HyperParams theta0, PAConfig cfg, bool record_trace = false);

    StepResult step(double t, double y);

    [[nodiscard]] Forecast forecast(double t) const { return pmgp::forecast(state_, t); }
    [[nodiscard]] const FilterState& state() const { return state_; }
    [[nodiscard]] const PAConfig& config() const { return cfg_; }
    [[nodiscard]] const std::vector<ThetaTraceEntry>& trace() const { return trace_; }
    [[nodiscard]] long updates_fired() const { return updates_fired_; }
    [[nodiscard]] long updates_rejected() const { return updates_rejected_; }

private:
    FilterState state_;
    PAConfig cfg_;
    bool record_trace_ = false;
    std::vector<ThetaTraceEntry> trace_;
    long updates_fired_ = 0;
    long updates_rejected_ = 0;
};

}  // namespace pmgp
