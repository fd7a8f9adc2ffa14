#include "pmgp/baselines.hpp"

#include "pmgp/errors.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <limits>

namespace pmgp {

std::string to_string(ARVariant v) {
    switch (v) {
        case ARVariant::pa: return "pa";
        case ARVariant::pa1: return "pa1";
        case ARVariant::pa2: return "pa2";
        case ARVariant::blr: return "blr";
    }
    return "unknown";
}

ARModel ARModel::passive_aggressive(int order, ARVariant variant, double C, double eps_insensitive) {
    if (order < 1) throw InputError("AR order must be >= 1");
    if (variant == ARVariant::blr) throw InputError("use ARModel::bayesian for BLR");
    if (!(C > 0.0)) throw InputError("PA aggressiveness C must be > 0");
    ARModel m;
    m.order = order;
    m.variant = variant;
    m.weights = Eigen::VectorXd::Zero(order);
    m.C = C;
    m.eps_insensitive = eps_insensitive;
    return m;
}

ARModel ARModel::bayesian(int order, double noise_std) {
    if (order < 1) throw InputError("AR order must be >= 1");
    if (!(noise_std > 0.0)) throw InputError("BLR noise std must be > 0");
    ARModel m;
    m.order = order;
    m.variant = ARVariant::blr;
    m.weights = Eigen::VectorXd::Zero(order);
    m.noise_std = noise_std;
    m.cov = Eigen::MatrixXd::Identity(order, order);
    return m;
}

Eigen::VectorXd ar_features(std::span<const double> history, int order) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(order);
    const auto n = static_cast<int>(history.size());
    for (int j = 0; j < order && j < n; ++j) x(j) = history[static_cast<std::size_t>(n - 1 - j)];
    return x;
}

double pa_step_size(ARVariant variant, double loss, double x_norm2, double C) {
    switch (variant) {
        case ARVariant::pa: return loss / x_norm2;
        case ARVariant::pa1: return std::min(C, loss / x_norm2);
        case ARVariant::pa2: return loss / (x_norm2 + 0.5 / C);
        case ARVariant::blr: break;
    }
    throw InputError("pa_step_size: not a PA variant");
}

ARModel pa_regress_update(ARModel model, const Eigen::VectorXd& x, double y) {
    if (model.variant == ARVariant::blr) throw InputError("pa_regress_update: model is BLR");
    const double residual = y - model.weights.dot(x);
    const double loss = std::max(std::abs(residual) - model.eps_insensitive, 0.0);
    if (loss == 0.0) return model;
    const double x_norm2 = x.squaredNorm();
    if (x_norm2 == 0.0) {
        if (model.variant == ARVariant::pa) spdlog::warn("PA regression: zero feature vector, skipping update");
        if (model.variant != ARVariant::pa2) return model;
    }
    const double tau = pa_step_size(model.variant, loss, x_norm2, model.C);
    model.weights += (residual > 0.0 ? 1.0 : -1.0) * tau * x;
    return model;
}

ARModel blr_update(ARModel model, const Eigen::VectorXd& x, double y) {
    if (model.variant != ARVariant::blr) throw InputError("blr_update: model is not BLR");
    const double s2 = model.noise_std * model.noise_std;
    const Eigen::VectorXd Sx = model.cov * x;
    const double denom = s2 + x.dot(Sx);
    model.weights += Sx * ((y - model.weights.dot(x)) / denom);
    Eigen::MatrixXd cov = model.cov - Sx * Sx.transpose() / denom;
    model.cov = 0.5 * (cov + cov.transpose());
    return model;
}

double blr_predict(const ARModel& model, const Eigen::VectorXd& x) { return model.weights.dot(x); }

ARForecaster::ARForecaster(ARModel model) : model_(std::move(model)) {}

Eigen::VectorXd ARForecaster::features() const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(model_.order);
    for (std::size_t j = 0; j < recent_.size(); ++j) x(static_cast<Eigen::Index>(j)) = recent_[j];
    return x;
}

double ARForecaster::predict_next() const { return model_.predict(features()); }

void ARForecaster::observe(double y) {
    const Eigen::VectorXd x = features();
    model_ = model_.variant == ARVariant::blr ? blr_update(std::move(model_), x, y)
                                              : pa_regress_update(std::move(model_), x, y);
    recent_.push_front(y);
    if (recent_.size() > static_cast<std::size_t>(model_.order)) recent_.pop_back();
}

NMAEResult nmae(std::span<const double> predictions, std::span<const double> actuals) {
    if (predictions.size() != actuals.size()) throw DimensionError("nmae: length mismatch");
    const std::size_t n = actuals.size();
    if (n < 2) throw InputError("nmae: need at least two points");

    double mean_inc = 0.0;
    for (std::size_t i = 1; i < n; ++i) mean_inc += actuals[i] - actuals[i - 1];
    mean_inc /= static_cast<double>(n - 1);
    double var_inc = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        const double d = actuals[i] - actuals[i - 1] - mean_inc;
        var_inc += d * d;
    }
    const double std_inc = std::sqrt(var_inc / static_cast<double>(n - 1));
    if (!(std_inc > 0.0)) throw InputError("nmae: degenerate series (zero increment std)");

    NMAEResult r;
    r.normalized_errors.reserve(n - 1);
    r.running.reserve(n - 1);
    double acc = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        const double e = std::abs(predictions[i] - actuals[i]) / std_inc;
        r.normalized_errors.push_back(e);
        acc += e;
        r.running.push_back(acc / static_cast<double>(i));
    }
    r.nmae = acc / static_cast<double>(n - 1);
    double var = 0.0;
    for (double e : r.normalized_errors) var += (e - r.nmae) * (e - r.nmae);
    r.nmae_std = std::sqrt(var / static_cast<double>(n - 1));
    return r;
}

double sample_std(std::span<const double> values) {
    if (values.size() < 2) return 0.0;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

}  // namespace pmgp
