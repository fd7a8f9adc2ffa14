#pragma once

#include "pmgp/filter.hpp"
#include "pmgp/kernels.hpp"

#include <Eigen/Dense>

namespace pmgp {

/// Dense GP regression under a spectral Matérn kernel plus white noise.
/// O(N^3); serves as ground truth for the state-space filter.
struct GPRProblem {
    Eigen::VectorXd times;
    Eigen::VectorXd observations;
    SpectralMaternKernel kern;
    TrendModel trend;
    double sigma = 1.0;

    void validate() const;
};

/// log N(y; m(times), K + sigma^2 I).
[[nodiscard]] double log_marginal_likelihood(const GPRProblem& prob);

/// Posterior of the latent z at t_star given all observations.
[[nodiscard]] Predictive posterior(const GPRProblem& prob, double t_star);

}  // namespace pmgp
