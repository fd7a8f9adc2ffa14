#include "pmgp/learner.hpp"

#include "pmgp/errors.hpp"
#include "pmgp/statespace.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <numbers>

namespace pmgp {

namespace {

// Sensitivities of one component's transition blocks to a scalar parameter.
struct BlockSensitivity {
    Eigen::MatrixXd dF;
    Eigen::MatrixXd dK_cond;
};

// dF = (dK_uv - F dK_vv) K_vv^{-1}
// dK_cond = dK_uu - dK_uv F^T + F dK_vv F^T - F dK_vu, using K_vv^{-1} K_vu = F^T,
// dK_uu = dK_vv (both at lag 0) and dK_vu = dK_uv^T.
BlockSensitivity transition_sensitivity(const Eigen::MatrixXd& K_vv, const Eigen::MatrixXd& F,
                                        const Eigen::MatrixXd& dK_uv, const Eigen::MatrixXd& dK_vv) {
    BlockSensitivity s;
    const Eigen::MatrixXd rhs = dK_uv - F * dK_vv;
    s.dF = spd_solve(K_vv, rhs.transpose()).transpose();
    const Eigen::MatrixXd cross = dK_uv * F.transpose();
    s.dK_cond = dK_vv - cross - cross.transpose() + F * dK_vv * F.transpose();
    return s;
}

}  // namespace

std::string to_string(OmegaSpace s) { return s == OmegaSpace::raw ? "raw" : "log"; }

OmegaSpace parse_omega_space(const std::string& name) {
    if (name == "log") return OmegaSpace::log;
    if (name == "raw") return OmegaSpace::raw;
    throw InputError("unknown omega space '" + name + "' (expected log or raw)");
}

void PAConfig::validate() const {
    if (!(c > 0.0) || !std::isfinite(c)) throw InputError("PA aggressiveness c must be > 0");
    if (!(eps >= 0.0) || !std::isfinite(eps)) throw InputError("PA tolerance eps must be >= 0");
    if (!(theta_norm_floor > 0.0)) throw InputError("PA theta norm floor must be > 0");
}

GradientBundle grad_local_loglik(const FilterState& state, double t, double y, const HyperParams& theta) {
    if (!std::isfinite(y)) throw InputError("grad_local_loglik: observation must be finite");
    const OneStepMoments mo = one_step_moments(state, t, theta);
    if (!(mo.var > 0.0) || !std::isfinite(mo.var)) {
        throw ConditioningError("grad_local_loglik: non-positive predictive variance");
    }
    const SpectralMaternKernel kern = theta.kernel(state.p);
    const Eigen::Index n = static_cast<Eigen::Index>(theta.size());
    const Eigen::Index b = state.p + 1;
    const Eigen::VectorXd& H = mo.model.H;

    GradientBundle g;
    g.dmean = Eigen::VectorXd::Zero(n);
    g.dvar = Eigen::VectorXd::Zero(n);
    g.loglik = gaussian_logpdf(y, mo.mean, mo.var);
    g.mean = mo.mean;
    g.var = mo.var;

    // Trend coefficients enter the mean only.
    const Eigen::VectorXd dm = mo.trend.gradient(t);
    g.dmean.head(dm.size()) = dm;

    // Noise enters the variance only: d sigma^2 / d log sigma = 2 sigma^2.
    g.dvar(static_cast<Eigen::Index>(theta.log_sigma_index())) = 2.0 * mo.sigma2;

    // Carried quantities used by the F-sensitivity terms; zero on the prior branch.
    const Eigen::VectorXd& m_prev = state.m;
    const Eigen::VectorXd FtH = mo.model.F.transpose() * H;
    const Eigen::VectorXd PFtH = state.P * FtH;

    for (std::size_t i = 0; i < kern.size(); ++i) {
        const KernelComponent& comp = kern.components()[i];
        const auto ii = static_cast<Eigen::Index>(i);
        const Eigen::Index off_c = 2 * ii * b;
        const Eigen::Index off_s = (2 * ii + 1) * b;

        const Eigen::MatrixXd K_vv = dgp_cross_cov(0.0, 0.0, comp).entries;
        const Eigen::MatrixXd dK_vv_l = dgp_cross_cov_dlog_l(0.0, 0.0, comp);

        BlockSensitivity s_k0;
        BlockSensitivity s_l;
        if (state.initialized) {
            const Eigen::MatrixXd F = mo.model.F.block(off_c, off_c, b, b);
            const Eigen::MatrixXd K_cond = mo.model.K_cond.block(off_c, off_c, b, b);
            const Eigen::MatrixXd dK_uv_l = dgp_cross_cov_dlog_l(t, state.t_last, comp);
            // Linear in k0: F is invariant and K_cond scales with k0.
            s_k0.dF = Eigen::MatrixXd::Zero(b, b);
            s_k0.dK_cond = K_cond;
            s_l = transition_sensitivity(K_vv, F, dK_uv_l, dK_vv_l);
        } else {
            s_k0.dF = Eigen::MatrixXd::Zero(b, b);
            s_k0.dK_cond = K_vv;
            s_l.dF = Eigen::MatrixXd::Zero(b, b);
            s_l.dK_cond = dK_vv_l;
        }

        auto apply = [&](const BlockSensitivity& s, std::size_t index) {
            double dmean = 0.0;
            double dvar = 0.0;
            for (Eigen::Index off : {off_c, off_s}) {
                const auto Hb = H.segment(off, b);
                // H^T dF m_prev
                dmean += Hb.dot(s.dF * m_prev.segment(off, b));
                // H^T dK_cond H
                dvar += Hb.dot(s.dK_cond * Hb);
                // H^T (dF P F^T + F P dF^T) H = 2 (dF^T H)^T P F^T H
                const Eigen::VectorXd a = s.dF.transpose() * Hb;
                dvar += 2.0 * a.dot(PFtH.segment(off, b));
            }
            g.dmean(static_cast<Eigen::Index>(index)) = dmean;
            g.dvar(static_cast<Eigen::Index>(index)) = dvar;
        };
        apply(s_k0, theta.log_k0_index(i));
        apply(s_l, theta.log_l_index(i));

        // omega enters through H_t only.
        Eigen::VectorXd dH = Eigen::VectorXd::Zero(H.size());
        dH(off_c) = -t * comp.omega * std::sin(comp.omega * t);
        dH(off_s) = t * comp.omega * std::cos(comp.omega * t);
        const auto iw = static_cast<Eigen::Index>(theta.log_omega_index(i));
        g.dmean(iw) = dH.dot(mo.m_minus);
        g.dvar(iw) = 2.0 * dH.dot(mo.P_minus * H);
    }

    const double e = y - mo.mean;
    const double v = mo.var;
    g.grad = (-0.5 / v + 0.5 * e * e / (v * v)) * g.dvar + (e / v) * g.dmean;
    return g;
}

double aggressiveness(const Eigen::VectorXd& theta, double loglik, const PAConfig& cfg) {
    const double denom = cfg.eps + loglik;
    return cfg.c * std::max(theta.squaredNorm(), cfg.theta_norm_floor) / (denom * denom);
}

Eigen::VectorXd pa_step(const Eigen::VectorXd& theta, double loglik, const Eigen::VectorXd& grad,
                        double eps, double c_k) {
    const double loss = -eps - loglik;
    if (!(loss > 0.0)) return theta;
    const double scale = c_k * loss / (1.0 + c_k * grad.squaredNorm());
    return theta + scale * grad;
}

HyperParams pa_update(const HyperParams& theta_prev, double loglik, const Eigen::VectorXd& grad,
                      const PAConfig& cfg) {
    Eigen::VectorXd theta = theta_prev.pack();
    if (grad.size() != theta.size()) throw DimensionError("pa_update: gradient length mismatch");
    if (!std::isfinite(loglik) || !grad.allFinite() || !theta.allFinite()) {
        throw InputError("pa_update: non-finite input");
    }
    if (loglik >= -cfg.eps) return theta_prev;

    const int n_comp = static_cast<int>(theta_prev.components.size());
    Eigen::VectorXd g = grad;
    if (cfg.omega_space == OmegaSpace::raw) {
        // dL/domega = dL/dlog(omega) / omega.
        for (int i = 0; i < n_comp; ++i) {
            const auto iw = static_cast<Eigen::Index>(theta_prev.log_omega_index(i));
            theta(iw) = std::exp(theta(iw));
            g(iw) /= theta(iw);
        }
    }
    Eigen::VectorXd next = pa_step(theta, loglik, g, cfg.eps, aggressiveness(theta, loglik, cfg));
    if (cfg.omega_space == OmegaSpace::raw) {
        for (int i = 0; i < n_comp; ++i) {
            const auto iw = static_cast<Eigen::Index>(theta_prev.log_omega_index(i));
            if (!(next(iw) > 0.0)) {
                spdlog::warn("pa_update: non-positive frequency rejected");
                return theta_prev;
            }
            next(iw) = std::log(next(iw));
        }
    }
    if (!next.allFinite()) {
        spdlog::warn("pa_update: non-finite hyperparameters rejected");
        return theta_prev;
    }
    return HyperParams::unpack(next, theta_prev.trend_kind, n_comp);
}

HyperParams initial_hyperparams(TrendKind trend, int n_components, double sampling_frequency) {
    if (!(sampling_frequency > 0.0) || !std::isfinite(sampling_frequency)) {
        throw InputError("sampling frequency must be > 0");
    }
    HyperParams h = HyperParams::zeros(trend, n_components);
    const double n = static_cast<double>(n_components - 1);
    for (int i = 0; i < n_components; ++i) {
        const double omega = (1.0 + i) / (1.0 + n) * std::numbers::pi * sampling_frequency;
        h.components[static_cast<std::size_t>(i)].log_omega = std::log(omega);
    }
    return h;
}

PmgpForecaster::PmgpForecaster(int p, HyperParams theta0, PAConfig cfg, bool record_trace)
    : state_(FilterState::initial(p, std::move(theta0))), cfg_(cfg), record_trace_(record_trace) {
    cfg_.validate();
}

StepResult PmgpForecaster::step(double t, double y) {
    if (!std::isfinite(y)) throw InputError("step: observation must be finite");
    StepResult out;

    // (1) PA update at theta_{t_{k-1}} against the incoming observation.
    const HyperParams previous = state_.theta;
    HyperParams candidate = previous;
    try {
        const GradientBundle g = grad_local_loglik(state_, t, y, previous);
        out.loglik = g.loglik;
        out.previous_predictive = Predictive{g.mean, g.var, PredictiveKind::observation};
        if (g.grad.allFinite() && std::isfinite(g.loglik)) {
            candidate = pa_update(previous, g.loglik, g.grad, cfg_);
        } else {
            spdlog::warn("step: non-finite gradient at t={}, skipping hyperparameter update", t);
        }
    } catch (const NumericalError& e) {
        spdlog::warn("step: gradient failed at t={} ({}), skipping hyperparameter update", t, e.what());
    }

    // (2)-(4) rebuild under theta_{t_k}, predict and update. Revert to the
    // previous hyperparameters if the candidate model is numerically unusable.
    const bool changed = candidate.pack() != previous.pack();
    FilterState trial = state_;
    trial.theta = candidate;
    UpdateResult res;
    try {
        res = update(trial, t, y);
    } catch (const NumericalError& e) {
        if (!changed) throw;
        spdlog::warn("step: hyperparameter update rejected at t={} ({})", t, e.what());
        ++updates_rejected_;
        trial.theta = previous;
        res = update(trial, t, y);
    }
    out.theta_updated = res.state.theta.pack() != previous.pack();
    if (out.theta_updated) ++updates_fired_;
    out.predictive = res.predictive;
    state_ = std::move(res.state);

    if (record_trace_) {
        trace_.push_back(ThetaTraceEntry{state_.k, t, out.theta_updated, state_.theta.pack()});
    }
    return out;
}

}  // namespace pmgp
