#pragma once

#include "gaussmet/gaussian.hpp"
#include "gaussmet/matkernel.hpp"

#include <random>

namespace gaussmet::randomized {

using Rng = std::mt19937_64;

// Hermitian matrix with i.i.d. complex normal entries (before symmetrization) times scale.
ComplexMatrix hermitian(Eigen::Index m, Rng& rng, double scale = 1.0);

// Haar-random unitary (QR of a complex Ginibre matrix with phase fix).
ComplexMatrix unitary(Eigen::Index m, Rng& rng);

// Random Hermitian PSD matrix of random rank.
ComplexMatrix psd(Eigen::Index m, Rng& rng);

// Random disentangled state with sinh^2 r_k <= max_s2 and |alpha_k|^2 <= max_a2.
DisentangledForm state(Eigen::Index m, Rng& rng, double max_s2, double max_a2);

}  // namespace gaussmet::randomized
