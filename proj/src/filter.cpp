#include "pmgp/filter.hpp"

#include "pmgp/errors.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <numbers>
#include <optional>
#include <string>

namespace pmgp {

namespace {

void check_time(const FilterState& state, double t) {
    if (!std::isfinite(t)) throw DomainError("filter: time must be finite");
    if (state.initialized && !(t > state.t_last)) {
        throw OrderingError("filter: time " + std::to_string(t) + " is not after last update at " +
                            std::to_string(state.t_last));
    }
}

void check_shape(const FilterState& state, const HyperParams& theta) {
    const Eigen::Index d =
        2 * static_cast<Eigen::Index>(state.p + 1) * static_cast<Eigen::Index>(theta.components.size());
    if (d != state.m.size() || state.P.rows() != d || state.P.cols() != d) {
        throw DimensionError("filter: hyperparameters do not match the state dimension");
    }
}

}  // namespace

FilterState FilterState::initial(int p, HyperParams theta) {
    if (p < 0) throw DomainError("filter: p must be >= 0");
    FilterState s;
    s.p = p;
    const SpectralMaternKernel kern = theta.kernel(p);
    s.theta = std::move(theta);
    s.m = Eigen::VectorXd::Zero(state_dimension(kern));
    s.P = prior_covariance(kern);
    return s;
}

OneStepMoments one_step_moments(const FilterState& state, double t, const HyperParams& theta) {
    check_time(state, t);
    check_shape(state, theta);
    const SpectralMaternKernel kern = theta.kernel(state.p);

    OneStepMoments mo;
    mo.trend = theta.trend();
    mo.sigma2 = std::exp(2.0 * theta.log_sigma);
    if (state.initialized) {
        mo.model = assemble(state.t_last, t, kern);
        mo.m_minus = mo.model.F * state.m;
        mo.P_minus = mo.model.F * state.P * mo.model.F.transpose() + mo.model.K_cond;
    } else {
        mo.model = assemble(std::nullopt, t, kern);
        mo.m_minus = Eigen::VectorXd::Zero(mo.model.dim());
        mo.P_minus = mo.model.K_cond;
    }
    const Eigen::VectorXd& H = mo.model.H;
    mo.mean = mo.trend(t) + H.dot(mo.m_minus);
    mo.var = H.dot(mo.P_minus * H) + mo.sigma2;
    return mo;
}

PredictedState predict_state(const FilterState& state, double t) {
    OneStepMoments mo = one_step_moments(state, t, state.theta);
    return PredictedState{std::move(mo.m_minus), std::move(mo.P_minus)};
}

UpdateResult update(const FilterState& state, double t, double y) {
    if (!std::isfinite(y)) throw InputError("filter: observation must be finite");
    const OneStepMoments mo = one_step_moments(state, t, state.theta);
    if (!(mo.var > 0.0) || !std::isfinite(mo.var)) {
        throw ConditioningError("filter: non-positive predictive variance");
    }

    const Eigen::VectorXd& H = mo.model.H;
    const double innovation = y - mo.mean;
    const Eigen::VectorXd gain = mo.P_minus * H / mo.var;

    UpdateResult out{state, Predictive{mo.mean, mo.var, PredictiveKind::observation}};
    FilterState& next = out.state;
    next.m = mo.m_minus + innovation * gain;
    Eigen::MatrixXd P = mo.P_minus - mo.var * gain * gain.transpose();
    next.P = 0.5 * (P + P.transpose());
    next.t_last = t;
    next.k = state.k + 1;
    next.initialized = true;
    return out;
}

Forecast forecast(const FilterState& state, double t) {
    const OneStepMoments mo = one_step_moments(state, t, state.theta);
    double latent_var = mo.var - mo.sigma2;
    if (latent_var < 0.0) {
        spdlog::warn("forecast: latent variance {} rounded below zero, clamping", latent_var);
        latent_var = 0.0;
    }
    return Forecast{Predictive{mo.mean, mo.var, PredictiveKind::observation},
                    Predictive{mo.mean, latent_var, PredictiveKind::latent_forecast}};
}

Predictive filtered_latent(const FilterState& state) {
    if (!state.initialized) throw InputError("filtered_latent: no observation has been processed");
    const SpectralMaternKernel kern = state.theta.kernel(state.p);
    const Eigen::VectorXd H = measurement_vector(state.t_last, kern);
    double var = H.dot(state.P * H);
    if (var < 0.0) {
        spdlog::warn("filtered_latent: variance {} rounded below zero, clamping", var);
        var = 0.0;
    }
    return Predictive{state.theta.trend()(state.t_last) + H.dot(state.m), var,
                      PredictiveKind::latent_filtered};
}

double gaussian_logpdf(double y, double mean, double var) {
    if (!(var > 0.0)) throw ConditioningError("gaussian_logpdf: variance must be positive");
    const double r = y - mean;
    return -0.5 * std::log(2.0 * std::numbers::pi) - 0.5 * std::log(var) - 0.5 * r * r / var;
}

double local_loglik(const FilterState& state, double t, double y, const HyperParams& theta) {
    if (!std::isfinite(y)) throw InputError("local_loglik: observation must be finite");
    const OneStepMoments mo = one_step_moments(state, t, theta);
    if (!(mo.var > 0.0) || !std::isfinite(mo.var)) {
        throw ConditioningError("local_loglik: non-positive predictive variance");
    }
    return gaussian_logpdf(y, mo.mean, mo.var);
}

}  // namespace pmgp
