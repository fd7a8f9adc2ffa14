#include "pmgp/kernels.hpp"

#include "pmgp/errors.hpp"

#include <cmath>
#include <string>

namespace pmgp {

namespace {

// Coefficients (ascending powers of x = a|tau|) of the polynomial q_m with
// d^m/dx^m [e^{-x} q_0(x)] = e^{-x} q_m(x), where q_0 is the half-integer
// Matérn polynomial normalized so q_0(0) = 1.
std::vector<double> derivative_polynomial(int p, int order) {
    std::vector<double> q(static_cast<std::size_t>(p) + 1);
    // q_0(x) = p!/(2p)! sum_j (2p-j)! / ((p-j)! j!) (2x)^j
    double lead = std::tgamma(p + 1.0) / std::tgamma(2.0 * p + 1.0);
    for (int j = 0; j <= p; ++j) {
        q[static_cast<std::size_t>(j)] = lead * std::tgamma(2.0 * p - j + 1.0) /
                                         (std::tgamma(p - j + 1.0) * std::tgamma(j + 1.0)) *
                                         std::ldexp(1.0, j);
    }
    for (int m = 0; m < order; ++m) {
        // q <- q' - q
        std::vector<double> next(q.size());
        for (std::size_t j = 0; j < q.size(); ++j) {
            next[j] = -q[j];
            if (j + 1 < q.size()) next[j] += static_cast<double>(j + 1) * q[j + 1];
        }
        q = std::move(next);
    }
    return q;
}

double horner(const std::vector<double>& coeffs, double x) {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
    return acc;
}

// One-sided closed form, valid for any order when tau != 0 and for orders
// <= 2p at tau == 0.
double derivative_unchecked(double tau, int order, const KernelComponent& comp) {
    if (tau == 0.0 && order % 2 == 1) return 0.0;
    const double a = comp.rate();
    const double x = a * std::abs(tau);
    const double value = comp.k0 * std::pow(a, order) * std::exp(-x) *
                         horner(derivative_polynomial(comp.p, order), x);
    return (tau < 0.0 && order % 2 == 1) ? -value : value;
}

void check_tau(double tau) {
    if (!std::isfinite(tau)) throw DomainError("kernel lag must be finite");
}

void check_order(int order, const KernelComponent& comp) {
    if (order < 0 || order > 2 * comp.p) {
        throw UnsupportedOrderError("Matérn-" + std::to_string(comp.p) +
                                    "+1/2 kernel is only " + std::to_string(2 * comp.p) +
                                    " times differentiable; requested order " +
                                    std::to_string(order));
    }
}

}  // namespace

void KernelComponent::validate() const {
    if (!(k0 > 0.0) || !std::isfinite(k0)) throw DomainError("kernel amplitude k0 must be > 0");
    if (!(l > 0.0) || !std::isfinite(l)) throw DomainError("kernel lengthscale l must be > 0");
    if (!(omega >= 0.0) || !std::isfinite(omega)) throw DomainError("kernel frequency must be >= 0");
    if (p < 0) throw DomainError("kernel smoothness p must be >= 0");
}

double KernelComponent::rate() const { return std::sqrt(2.0 * p + 1.0) / l; }

SpectralMaternKernel::SpectralMaternKernel(std::vector<KernelComponent> components)
    : components_(std::move(components)) {
    if (components_.empty()) throw DomainError("spectral Matérn kernel needs at least one component");
    p_ = components_.front().p;
    for (const auto& c : components_) {
        c.validate();
        if (c.p != p_) throw DomainError("all spectral Matérn components must share p");
    }
}

double SpectralMaternKernel::total_amplitude() const {
    double s = 0.0;
    for (const auto& c : components_) s += c.k0;
    return s;
}

double matern_eval(double tau, const KernelComponent& comp) {
    check_tau(tau);
    return derivative_unchecked(tau, 0, comp);
}

double matern_derivative(double tau, int order, const KernelComponent& comp) {
    check_tau(tau);
    check_order(order, comp);
    return derivative_unchecked(tau, order, comp);
}

double matern_derivative_dlog_l(double tau, int order, const KernelComponent& comp) {
    check_tau(tau);
    check_order(order, comp);
    // k^(m)(tau) = k0 a^m f^(m)(a tau) with a = sqrt(2p+1)/l, so
    // d/dlog l = -(m k^(m)(tau) + tau k^(m+1)(tau)).
    double value = static_cast<double>(order) * derivative_unchecked(tau, order, comp);
    if (tau != 0.0) value += tau * derivative_unchecked(tau, order + 1, comp);
    return -value;
}

double spectral_matern_eval(double tau, const SpectralMaternKernel& kern) {
    check_tau(tau);
    double s = 0.0;
    for (const auto& c : kern.components()) s += matern_eval(tau, c) * std::cos(c.omega * tau);
    return s;
}

int trend_dimension(TrendKind kind) { return kind == TrendKind::linear ? 2 : 1; }

double TrendModel::operator()(double t) const {
    double m = beta(0);
    if (kind == TrendKind::linear) m += beta(1) * t;
    return m;
}

Eigen::VectorXd TrendModel::gradient(double t) const {
    Eigen::VectorXd g(trend_dimension(kind));
    g(0) = 1.0;
    if (kind == TrendKind::linear) g(1) = t;
    return g;
}

HyperParams HyperParams::zeros(TrendKind kind, int n_components) {
    if (n_components < 1) throw DimensionError("need at least one kernel component");
    HyperParams h;
    h.trend_kind = kind;
    h.beta = Eigen::VectorXd::Zero(trend_dimension(kind));
    h.components.assign(static_cast<std::size_t>(n_components), ComponentLogParams{});
    return h;
}

std::size_t HyperParams::flat_size(TrendKind kind, int n_components) {
    return static_cast<std::size_t>(trend_dimension(kind)) + 1 +
           3 * static_cast<std::size_t>(n_components);
}

HyperParams HyperParams::unpack(std::span<const double> flat, TrendKind kind, int n_components) {
    if (n_components < 1) throw DimensionError("need at least one kernel component");
    if (flat.size() != flat_size(kind, n_components)) {
        throw DimensionError("hyperparameter vector has length " + std::to_string(flat.size()) +
                             ", expected " + std::to_string(flat_size(kind, n_components)));
    }
    HyperParams h = zeros(kind, n_components);
    std::size_t k = 0;
    for (Eigen::Index j = 0; j < h.beta.size(); ++j) h.beta(j) = flat[k++];
    h.log_sigma = flat[k++];
    for (auto& c : h.components) {
        c.log_k0 = flat[k++];
        c.log_l = flat[k++];
        c.log_omega = flat[k++];
    }
    return h;
}

HyperParams HyperParams::unpack(const Eigen::VectorXd& flat, TrendKind kind, int n_components) {
    return unpack(std::span<const double>(flat.data(), static_cast<std::size_t>(flat.size())),
                  kind, n_components);
}

Eigen::VectorXd HyperParams::pack() const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(size()));
    Eigen::Index k = 0;
    for (Eigen::Index j = 0; j < beta.size(); ++j) v(k++) = beta(j);
    v(k++) = log_sigma;
    for (const auto& c : components) {
        v(k++) = c.log_k0;
        v(k++) = c.log_l;
        v(k++) = c.log_omega;
    }
    return v;
}

std::size_t HyperParams::size() const {
    return static_cast<std::size_t>(beta.size()) + 1 + 3 * components.size();
}

std::size_t HyperParams::log_sigma_index() const { return static_cast<std::size_t>(beta.size()); }
std::size_t HyperParams::log_k0_index(std::size_t i) const { return log_sigma_index() + 1 + 3 * i; }
std::size_t HyperParams::log_l_index(std::size_t i) const { return log_k0_index(i) + 1; }
std::size_t HyperParams::log_omega_index(std::size_t i) const { return log_k0_index(i) + 2; }

double HyperParams::sigma() const { return std::exp(log_sigma); }

TrendModel HyperParams::trend() const { return TrendModel{trend_kind, beta}; }

SpectralMaternKernel HyperParams::kernel(int p) const {
    std::vector<KernelComponent> comps;
    comps.reserve(components.size());
    for (const auto& c : components) {
        comps.push_back(KernelComponent{std::exp(c.log_k0), std::exp(c.log_l), std::exp(c.log_omega), p});
    }
    return SpectralMaternKernel(std::move(comps));
}

}  // namespace pmgp
