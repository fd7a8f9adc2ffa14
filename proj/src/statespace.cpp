#include "pmgp/statespace.hpp"

#include "pmgp/errors.hpp"

#include <array>
#include <cmath>

namespace pmgp {

namespace {

constexpr std::array<double, 4> kJitterLevels = {0.0, 1e-12, 1e-10, 1e-8};

Eigen::MatrixXd cross_cov_entries(double tau, const KernelComponent& comp, bool dlog_l) {
    const int n = comp.p + 1;
    Eigen::MatrixXd K(n, n);
    // Entries depend only on i + j; evaluate each order once.
    Eigen::VectorXd by_order(2 * comp.p + 1);
    for (int m = 0; m <= 2 * comp.p; ++m) {
        by_order(m) = dlog_l ? matern_derivative_dlog_l(tau, m, comp) : matern_derivative(tau, m, comp);
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double sign = (j % 2 == 0) ? 1.0 : -1.0;
            K(i, j) = sign * by_order(i + j);
        }
    }
    return K;
}

double mean_diagonal(const Eigen::MatrixXd& M) {
    return M.rows() == 0 ? 0.0 : M.diagonal().mean();
}

void place_block(Eigen::MatrixXd& dst, Eigen::Index block, const Eigen::MatrixXd& src) {
    const Eigen::Index b = src.rows();
    dst.block(block * b, block * b, b, b) = src;
}

}  // namespace

CrossCovMatrix dgp_cross_cov(double u, double v, const KernelComponent& comp) {
    comp.validate();
    return CrossCovMatrix{cross_cov_entries(u - v, comp, false), u, v};
}

Eigen::MatrixXd dgp_cross_cov_dlog_l(double u, double v, const KernelComponent& comp) {
    comp.validate();
    return cross_cov_entries(u - v, comp, true);
}

PsdFactor cholesky_psd(const Eigen::MatrixXd& M) {
    if (M.rows() != M.cols()) throw DimensionError("cholesky_psd needs a square matrix");
    const double scale = M.cwiseAbs().maxCoeff();
    if (M.size() == 0 || scale == 0.0) {
        return PsdFactor{Eigen::MatrixXd::Zero(M.rows(), M.cols()), FactorPath::cholesky, 0.0};
    }
    if (!M.allFinite()) throw ConditioningError("cholesky_psd: non-finite matrix entries");
    if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
        throw InputError("cholesky_psd: matrix is not symmetric");
    }
    const Eigen::MatrixXd S = 0.5 * (M + M.transpose());
    const double diag_scale = std::max(mean_diagonal(S), 0.0);
    for (double eps : kJitterLevels) {
        if (eps > 0.0 && diag_scale == 0.0) break;
        Eigen::MatrixXd A = S;
        A.diagonal().array() += eps * diag_scale;
        Eigen::LLT<Eigen::MatrixXd> llt(A);
        if (llt.info() == Eigen::Success) {
            return PsdFactor{llt.matrixL(), eps == 0.0 ? FactorPath::cholesky : FactorPath::jittered_cholesky,
                             eps * diag_scale};
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S);
    if (eig.info() != Eigen::Success) throw ConditioningError("cholesky_psd: eigendecomposition failed");
    const Eigen::VectorXd lambda = eig.eigenvalues();
    const double trace = std::max(S.trace(), scale);
    if (lambda.minCoeff() < -1e-6 * trace) {
        throw ConditioningError("cholesky_psd: matrix is indefinite (min eigenvalue " +
                                std::to_string(lambda.minCoeff()) + ")");
    }
    const Eigen::VectorXd root = lambda.cwiseMax(0.0).cwiseSqrt();
    return PsdFactor{eig.eigenvectors() * root.asDiagonal(), FactorPath::eigen_clamped, 0.0};
}

Eigen::MatrixXd spd_solve(const Eigen::MatrixXd& M, const Eigen::MatrixXd& B) {
    if (M.rows() != M.cols() || M.rows() != B.rows()) throw DimensionError("spd_solve: shape mismatch");
    const double diag_scale = mean_diagonal(M);
    if (!(diag_scale > 0.0) || !M.allFinite()) throw ConditioningError("spd_solve: matrix is not positive definite");
    for (double eps : kJitterLevels) {
        Eigen::MatrixXd A = M;
        A.diagonal().array() += eps * diag_scale;
        Eigen::LLT<Eigen::MatrixXd> llt(A);
        if (llt.info() == Eigen::Success) return llt.solve(B);
    }
    throw ConditioningError("spd_solve: matrix singular after jitter escalation");
}

ComponentTransition component_transition(double u, double v, const KernelComponent& comp) {
    if (!(u > v)) throw OrderingError("component_transition requires u > v");
    const Eigen::MatrixXd K_uv = dgp_cross_cov(u, v, comp).entries;
    const Eigen::MatrixXd K_vv = dgp_cross_cov(v, v, comp).entries;

    ComponentTransition tr;
    tr.dt = u - v;
    // F = K_uv K_vv^{-1}  <=>  F^T = K_vv^{-1} K_vu, with K_vu = K_uv^T.
    tr.F = spd_solve(K_vv, K_uv.transpose()).transpose();
    Eigen::MatrixXd K_cond = K_vv - tr.F * K_uv.transpose();
    tr.K_cond = 0.5 * (K_cond + K_cond.transpose());
    PsdFactor factor = cholesky_psd(tr.K_cond);
    tr.L = std::move(factor.L);
    tr.factor_path = factor.path;
    return tr;
}

Eigen::Index state_dimension(const SpectralMaternKernel& kern) {
    return 2 * static_cast<Eigen::Index>(kern.p() + 1) * static_cast<Eigen::Index>(kern.size());
}

Eigen::VectorXd measurement_vector(double t, const SpectralMaternKernel& kern) {
    const Eigen::Index b = kern.p() + 1;
    Eigen::VectorXd H = Eigen::VectorXd::Zero(state_dimension(kern));
    for (std::size_t i = 0; i < kern.size(); ++i) {
        const double w = kern.components()[i].omega;
        const auto ii = static_cast<Eigen::Index>(i);
        H(2 * ii * b) = std::cos(w * t);
        H((2 * ii + 1) * b) = std::sin(w * t);
    }
    return H;
}

Eigen::MatrixXd prior_covariance(const SpectralMaternKernel& kern) {
    const Eigen::Index d = state_dimension(kern);
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(d, d);
    for (std::size_t i = 0; i < kern.size(); ++i) {
        const Eigen::MatrixXd K = dgp_cross_cov(0.0, 0.0, kern.components()[i]).entries;
        const auto ii = static_cast<Eigen::Index>(i);
        place_block(P, 2 * ii, K);
        place_block(P, 2 * ii + 1, K);
    }
    return P;
}

AssembledModel assemble(std::optional<double> t_prev, double t, const SpectralMaternKernel& kern) {
    if (!std::isfinite(t)) throw DomainError("assemble: time must be finite");
    const Eigen::Index d = state_dimension(kern);
    AssembledModel model;
    model.p = kern.p();
    model.n_components = static_cast<Eigen::Index>(kern.size());
    model.t = t;
    model.H = measurement_vector(t, kern);

    if (!t_prev) {
        model.initial = true;
        model.F = Eigen::MatrixXd::Zero(d, d);
        model.K_cond = prior_covariance(kern);
        model.L = Eigen::MatrixXd::Zero(d, d);
        for (Eigen::Index blk = 0; blk < 2 * model.n_components; ++blk) {
            const Eigen::Index b = kern.p() + 1;
            const Eigen::MatrixXd K = model.K_cond.block(blk * b, blk * b, b, b);
            model.L.block(blk * b, blk * b, b, b) = cholesky_psd(K).L;
        }
        return model;
    }

    if (!(t > *t_prev)) {
        throw OrderingError("assemble: time " + std::to_string(t) + " is not after " +
                            std::to_string(*t_prev));
    }
    model.F = Eigen::MatrixXd::Zero(d, d);
    model.K_cond = Eigen::MatrixXd::Zero(d, d);
    model.L = Eigen::MatrixXd::Zero(d, d);
    for (std::size_t i = 0; i < kern.size(); ++i) {
        const ComponentTransition tr = component_transition(t, *t_prev, kern.components()[i]);
        const auto ii = static_cast<Eigen::Index>(i);
        for (Eigen::Index copy : {2 * ii, 2 * ii + 1}) {
            place_block(model.F, copy, tr.F);
            place_block(model.K_cond, copy, tr.K_cond);
            place_block(model.L, copy, tr.L);
        }
    }
    return model;
}

}  // namespace pmgp
