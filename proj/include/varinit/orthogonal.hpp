#pragma once

#include <cmath>
#include <cstddef>

#include "matrix.hpp"
#include "rng.hpp"

namespace varinit {

// Random orthogonal matrix: QR-decompose a square Gaussian matrix by
// Householder reflections and keep Q, with column signs fixed so diag(R) > 0.
// The sign fix makes the distribution Haar over O(m) and, for m = 1, reduces
// the result to +1 or -1 with equal probability.
inline Matrix random_orthogonal(std::size_t m, Rng& rng) {
    if (m == 0) throw std::invalid_argument("random_orthogonal: m must be positive");

    Matrix a(m, m);
    {
        Vector g = rng.gaussian_vector(0.0, 1.0, m * m);
        for (std::size_t i = 0; i < m * m; ++i) a.data()[i] = g[i];
    }

    Matrix q = Matrix::identity(m);
    Vector v(m);
    for (std::size_t k = 0; k < m; ++k) {
        double norm = 0.0;
        for (std::size_t i = k; i < m; ++i) norm += a(i, k) * a(i, k);
        norm = std::sqrt(norm);
        if (norm == 0.0) continue;

        const double alpha = a(k, k) >= 0.0 ? -norm : norm;
        double vnorm2 = 0.0;
        for (std::size_t i = k; i < m; ++i) {
            v[i] = a(i, k) - (i == k ? alpha : 0.0);
            vnorm2 += v[i] * v[i];
        }
        if (vnorm2 == 0.0) continue;

        // A <- (I - 2 v v^T / |v|^2) A, Q <- Q (I - 2 v v^T / |v|^2)
        for (std::size_t j = k; j < m; ++j) {
            double dot = 0.0;
            for (std::size_t i = k; i < m; ++i) dot += v[i] * a(i, j);
            const double s = 2.0 * dot / vnorm2;
            for (std::size_t i = k; i < m; ++i) a(i, j) -= s * v[i];
        }
        for (std::size_t i = 0; i < m; ++i) {
            double dot = 0.0;
            for (std::size_t j = k; j < m; ++j) dot += q(i, j) * v[j];
            const double s = 2.0 * dot / vnorm2;
            for (std::size_t j = k; j < m; ++j) q(i, j) -= s * v[j];
        }
    }

    // R = Q^T A at this point lives in a; flip columns of Q where diag(R) < 0
    for (std::size_t k = 0; k < m; ++k)
        if (a(k, k) < 0.0)
            for (std::size_t i = 0; i < m; ++i) q(i, k) = -q(i, k);

    return q;
}

}  // namespace varinit
