#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "hisom/matrix.hpp"

namespace hisom {

using Rng = std::mt19937_64;

// Random unitary. Exact mode: a random signed permutation followed by 2n
// two-row Hadamard mixes with 8th-root-of-unity phases, so entries stay in
// Q(i, sqrt2) with power-of-two denominators; draws use raw engine output so
// the result is platform independent. Float mode: QR of a complex
// Gaussian matrix with the phases of R's diagonal divided out.
template <class S>
Matrix<S> random_unitary(std::size_t n, Rng& rng);
template <>
Matrix<Exact> random_unitary<Exact>(std::size_t n, Rng& rng);
template <>
Matrix<Complex> random_unitary<Complex>(std::size_t n, Rng& rng);

// rows x cols matrix with orthonormal rows: the last rows of a random unitary.
template <class S>
Matrix<S> random_coisometry(std::size_t rows, std::size_t cols, Rng& rng);

std::vector<Complex> random_unit_vector(std::size_t n, Rng& rng);
// Uniform direction, radius uniform in [0, max_radius).
std::vector<Complex> random_ball_point(std::size_t n, double max_radius, Rng& rng);

// Integer uniform in [lo, hi] from raw engine output.
long draw_int(Rng& rng, long lo, long hi);

}  // namespace hisom
