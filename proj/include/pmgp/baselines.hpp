#pragma once

#include <Eigen/Dense>

#include <deque>
#include <span>
#include <string>
#include <vector>

namespace pmgp {

enum class ARVariant { pa, pa1, pa2, blr };

[[nodiscard]] std::string to_string(ARVariant v);

/// Online autoregressive model with weights learned by PA, PA-I, PA-II or
/// Bayesian linear regression (prior N(0, I)).
struct ARModel {
    int order = 2;
    ARVariant variant = ARVariant::pa;
    Eigen::VectorXd weights;  ///< PA weights, or BLR posterior mean
    double C = 100.0;         ///< PA-I / PA-II aggressiveness
    double eps_insensitive = 0.0;
    double noise_std = 1.0;   ///< BLR only
    Eigen::MatrixXd cov;      ///< BLR posterior covariance

    [[nodiscard]] static ARModel passive_aggressive(int order, ARVariant variant, double C = 100.0,
                                                    double eps_insensitive = 0.0);
    [[nodiscard]] static ARModel bayesian(int order, double noise_std);

    [[nodiscard]] double predict(const Eigen::VectorXd& x) const { return weights.dot(x); }
};

/// Last `order` values of history, most recent first, zero-padded.
[[nodiscard]] Eigen::VectorXd ar_features(std::span<const double> history, int order);

/// Step size tau for the given PA variant.
[[nodiscard]] double pa_step_size(ARVariant variant, double loss, double x_norm2, double C);

[[nodiscard]] ARModel pa_regress_update(ARModel model, const Eigen::VectorXd& x, double y);

[[nodiscard]] ARModel blr_update(ARModel model, const Eigen::VectorXd& x, double y);
[[nodiscard]] double blr_predict(const ARModel& model, const Eigen::VectorXd& x);

/// Streaming wrapper holding only the last `order` observations.
class ARForecaster {
public:
    explicit ARForecaster(ARModel model);

    [[nodiscard]] double predict_next() const;
    void observe(double y);

    [[nodiscard]] const ARModel& model() const { return model_; }

private:
    [[nodiscard]] Eigen::VectorXd features() const;

    ARModel model_;
    std::deque<double> recent_;  ///< most recent first
};

struct NMAEResult {
    double nmae = 0.0;
    double nmae_std = 0.0;
    std::vector<double> normalized_errors;  ///< |error| / increment std, steps 1..N-1
    std::vector<double> running;            ///< running mean of normalized_errors
};

/// Mean absolute one-step error over steps 1..N-1 (the first forecast is
/// excluded) divided by the population standard deviation of the actuals'
/// first differences.
[[nodiscard]] NMAEResult nmae(std::span<const double> predictions, std::span<const double> actuals);

/// Sample standard deviation (n - 1 denominator).
[[nodiscard]] double sample_std(std::span<const double> values);

}  // namespace pmgp
