#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace pmgp {

/// One half-integer Matérn component k_ma(tau; k0, l, p + 1/2), modulated by cos(omega * tau).
struct KernelComponent {
    double k0 = 1.0;     ///< amplitude (variance units)
    double l = 1.0;      ///< lengthscale (time units)
    double omega = 0.0;  ///< angular frequency (rad per time unit)
    int p = 0;           ///< smoothness, nu = p + 1/2

    void validate() const;

    /// Decay rate sqrt(2p + 1) / l of the exponential envelope.
    [[nodiscard]] double rate() const;
};

/// Sum of Matérn-(p+1/2) components each multiplied by cos(omega_i tau).
class SpectralMaternKernel {
public:
    explicit SpectralMaternKernel(std::vector<KernelComponent> components);

    [[nodiscard]] int p() const { return p_; }
    [[nodiscard]] const std::vector<KernelComponent>& components() const { return components_; }
    [[nodiscard]] std::size_t size() const { return components_.size(); }

    /// k_sma(0) = sum of the component amplitudes.
    [[nodiscard]] double total_amplitude() const;

private:
    std::vector<KernelComponent> components_;
    int p_ = 0;
};

/// Matérn-(p+1/2) covariance at lag tau.
///
/// Uses the closed half-integer form k0 e^{-a|tau|} Q_p(a|tau|) with a = sqrt(2p+1)/l,
/// where Q_p is the degree-p polynomial from the Bessel-function expansion.
[[nodiscard]] double matern_eval(double tau, const KernelComponent& comp);

/// m-th derivative in tau of matern_eval, for 0 <= m <= 2p.
/// Throws UnsupportedOrderError for m > 2p; exact zero for odd m at tau == 0.
[[nodiscard]] double matern_derivative(double tau, int order, const KernelComponent& comp);

/// d/d(log l) of the m-th tau-derivative, for 0 <= m <= 2p.
[[nodiscard]] double matern_derivative_dlog_l(double tau, int order, const KernelComponent& comp);

[[nodiscard]] double spectral_matern_eval(double tau, const SpectralMaternKernel& kern);

enum class TrendKind { constant, linear };

[[nodiscard]] int trend_dimension(TrendKind kind);

/// Parametric mean function m(t) = beta_0 (+ beta_1 t).
struct TrendModel {
    TrendKind kind = TrendKind::linear;
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(2);

    [[nodiscard]] double operator()(double t) const;
    /// dm/dbeta at t: (1) or (1, t).
    [[nodiscard]] Eigen::VectorXd gradient(double t) const;
};

struct ComponentLogParams {
    double log_k0 = 0.0;
    double log_l = 0.0;
    double log_omega = 0.0;
};

/// Learnable parameter vector. Flat order: beta, log_sigma, then
/// (log_k0, log_l, log_omega) per component in index order.
struct HyperParams {
    TrendKind trend_kind = TrendKind::linear;
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(2);
    double log_sigma = 0.0;
    std::vector<ComponentLogParams> components;

    [[nodiscard]] static HyperParams zeros(TrendKind kind, int n_components);
    [[nodiscard]] static HyperParams unpack(std::span<const double> flat, TrendKind kind,
                                            int n_components);
    [[nodiscard]] static HyperParams unpack(const Eigen::VectorXd& flat, TrendKind kind,
                                            int n_components);
    [[nodiscard]] static std::size_t flat_size(TrendKind kind, int n_components);

    [[nodiscard]] Eigen::VectorXd pack() const;
    [[nodiscard]] std::size_t size() const;

    // Offsets into the flat vector.
    [[nodiscard]] std::size_t log_sigma_index() const;
    [[nodiscard]] std::size_t log_k0_index(std::size_t i) const;
    [[nodiscard]] std::size_t log_l_index(std::size_t i) const;
    [[nodiscard]] std::size_t log_omega_index(std::size_t i) const;

    [[nodiscard]] double sigma() const;
    [[nodiscard]] TrendModel trend() const;
    [[nodiscard]] SpectralMaternKernel kernel(int p) const;
};

}  // namespace pmgp
