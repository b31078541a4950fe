#include "minkproj/cg.hpp"

#include <cmath>

#include "minkproj/error.hpp"

namespace minkproj {

namespace {

double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

} // namespace

CgResult conjugate_gradient(const SparseMatrix& q, std::span<const double> b, std::span<double> x,
                            const CgOptions& opts)
{
    const auto n = b.size();
    if (q.rows() != n || q.cols() != n || x.size() != n) {
        throw ShapeError("conjugate_gradient: dimension mismatch");
    }
    CgResult res;
    const double bnorm = std::sqrt(dot(b, b));
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        res.converged = true;
        return res;
    }
    const std::size_t max_iters = opts.max_iters ? opts.max_iters : n;

    Vector r(n), p(n), qp(n);
    q.matvec(x, qp, opts.threads);
    for (std::size_t i = 0; i < n; ++i) {
        r[i] = b[i] - qp[i];
    }
    double rr = dot(r, r);
    auto record = [&] {
        res.relative_residual = std::sqrt(rr) / bnorm;
        res.residual_history.push_back(res.relative_residual);
        if (opts.record_energy) {
            // 1/2 x'Qx - b'x = -1/2 (x'r + b'x) with r = b - Qx.
            res.energy_history.push_back(-0.5 * (dot(x, r) + dot(b, x)));
        }
    };
    record();
    p = r;
    while (res.relative_residual > opts.tol && res.iterations < max_iters) {
        q.matvec(p, qp, opts.threads);
        const double curvature = dot(p, qp);
        if (!(curvature > 0.0)) {
            throw SolverError("conjugate gradient met non-positive curvature: the system matrix is not "
                              "positive definite (each component needs an identity-transform bound so the "
                              "stacked operator has full column rank)");
        }
        const double alpha = rr / curvature;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * qp[i];
        }
        const double rr_new = dot(r, r);
        const double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = r[i] + beta * p[i];
        }
        ++res.iterations;
        record();
    }
    res.converged = res.relative_residual <= opts.tol;
    return res;
}

} // namespace minkproj
