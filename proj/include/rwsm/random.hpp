#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace rwsm {

using Rng = std::mt19937_64;

/// Independent generator for (seed, stream). Used so that per-radius,
/// per-restart and per-scale sampling does not depend on execution order.
Rng substream(std::uint64_t seed, std::uint64_t stream);

Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng);

double uniform01(Rng& rng);

}  // namespace rwsm
