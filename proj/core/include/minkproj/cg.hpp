#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "minkproj/sparse.hpp"

namespace minkproj {

struct CgOptions {
    double tol = 1e-8;           ///< relative residual ||b - Qx|| / ||b||
    std::size_t max_iters = 0;   ///< 0: dimension of the system
    std::size_t threads = 1;
    bool record_energy = false;  ///< keep 1/2 x'Qx - b'x after every iterate
};

struct CgResult {
    std::size_t iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
    std::vector<double> residual_history;
    std::vector<double> energy_history;
};

/// Conjugate gradients for symmetric positive definite Q, warm started from x.
/// Throws SolverError on non-positive curvature (Q not positive definite).
CgResult conjugate_gradient(const SparseMatrix& q, std::span<const double> b, std::span<double> x,
                            const CgOptions& opts = {});

} // namespace minkproj
