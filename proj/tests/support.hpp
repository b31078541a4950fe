#pragma once

// Shared helpers and independent reference implementations for the tests.
// Nothing here calls into the library's projection or assembly code except
// where noted.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "minkproj/grid.hpp"
#include "minkproj/prox.hpp"

namespace testing {

using minkproj::Vector;

inline Vector random_vector(std::mt19937_64& rng, std::size_t n, double lo = -1.0, double hi = 1.0)
{
    std::uniform_real_distribution<double> d(lo, hi);
    Vector v(n);
    for (auto& x : v) {
        x = d(rng);
    }
    return v;
}

inline double dot(std::span<const double> a, std::span<const double> b)
{
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

inline double norm(std::span<const double> a)
{
    return std::sqrt(dot(a, a));
}

inline double dist(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += (a[i] - b[i]) * (a[i] - b[i]);
    }
    return std::sqrt(s);
}

inline double rel_dist(std::span<const double> a, std::span<const double> b)
{
    return dist(a, b) / std::max({norm(a), norm(b), 1e-300});
}

inline Eigen::VectorXd to_eigen(std::span<const double> v)
{
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline Vector from_eigen(const Eigen::VectorXd& v)
{
    return Vector(v.data(), v.data() + v.size());
}

inline Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b)
{
    Eigen::MatrixXd k(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return k;
}

/// (n-1) x n forward difference.
inline Eigen::MatrixXd difference_1d(std::size_t n)
{
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n - 1), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i + 1 < static_cast<Eigen::Index>(n); ++i) {
        d(i, i) = -1.0;
        d(i, i + 1) = 1.0;
    }
    return d;
}

/// Dense derivative along `axis` for first-axis-fastest ordering:
/// I_outer (x) D (x) I_inner, with the fastest index innermost.
inline Eigen::MatrixXd dense_derivative(const std::vector<std::size_t>& dims, std::size_t axis)
{
    std::size_t inner = 1, outer = 1;
    for (std::size_t a = 0; a < axis; ++a) {
        inner *= dims[a];
    }
    for (std::size_t a = axis + 1; a < dims.size(); ++a) {
        outer *= dims[a];
    }
    const auto eye = [](std::size_t n) {
        return Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    };
    return kron(eye(outer), kron(difference_1d(dims[axis]), eye(inner)));
}

/// Membership predicates written from the set definitions, independent of
/// the projection code.
inline bool in_box(std::span<const double> x, std::span<const double> lo, std::span<const double> hi, double tol)
{
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] < lo[i] - tol || x[i] > hi[i] + tol) {
            return false;
        }
    }
    return true;
}

inline double l1(std::span<const double> x)
{
    double s = 0.0;
    for (double v : x) {
        s += std::abs(v);
    }
    return s;
}

/// Soft-threshold level for the l1-ball by bisection on
/// g(t) = sum max(|y_i| - t, 0) - sigma, which is decreasing in t.
inline Vector l1_ball_bisection(std::span<const double> y, double sigma)
{
    if (l1(y) <= sigma) {
        return Vector(y.begin(), y.end());
    }
    double lo = 0.0, hi = 0.0;
    for (double v : y) {
        hi = std::max(hi, std::abs(v));
    }
    for (int it = 0; it < 200; ++it) {
        const double t = 0.5 * (lo + hi);
        double s = 0.0;
        for (double v : y) {
            s += std::max(std::abs(v) - t, 0.0);
        }
        (s > sigma ? lo : hi) = t;
    }
    const double t = 0.5 * (lo + hi);
    Vector out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        out[i] = std::copysign(std::max(std::abs(y[i]) - t, 0.0), y[i]);
    }
    return out;
}

/// Best k-sparse approximation error by enumerating every support of size k.
inline double cardinality_exhaustive(std::span<const double> y, std::size_t k)
{
    const auto n = y.size();
    std::vector<bool> pick(n, false);
    std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(k), true);
    double best = std::numeric_limits<double>::infinity();
    std::sort(pick.begin(), pick.end());
    do {
        double e = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!pick[i]) {
                e += y[i] * y[i];
            }
        }
        best = std::min(best, e);
    } while (std::next_permutation(pick.begin(), pick.end()));
    return best;
}

/// Convex set in (u, v) space, given by its Euclidean projection.
using LiftedProjector = std::function<void(Vector& u, Vector& v)>;

/// Dykstra's alternating projections onto the intersection of the given
/// convex sets, started at (u, v).
inline void dykstra(const std::vector<LiftedProjector>& sets, Vector& u, Vector& v, double tol = 1e-14,
                    int max_sweeps = 20000)
{
    const auto n = u.size();
    std::vector<Vector> pu(sets.size(), Vector(n, 0.0)), pv(sets.size(), Vector(n, 0.0));
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double change = 0.0;
        for (std::size_t s = 0; s < sets.size(); ++s) {
            Vector a(n), b(n);
            for (std::size_t i = 0; i < n; ++i) {
                a[i] = u[i] + pu[s][i];
                b[i] = v[i] + pv[s][i];
            }
            Vector pa = a, pb = b;
            sets[s](pa, pb);
            for (std::size_t i = 0; i < n; ++i) {
                pu[s][i] = a[i] - pa[i];
                pv[s][i] = b[i] - pb[i];
                change = std::max({change, std::abs(pa[i] - u[i]), std::abs(pb[i] - v[i])});
            }
            u = std::move(pa);
            v = std::move(pb);
        }
        if (change < tol) {
            return;
        }
    }
}

/// Reference projection onto a generalized Minkowski set with identity
/// transforms: accelerated projected gradient on
///   min 1/2 ||u + v - m||^2  s.t. (u, v) in C_1 n ... n C_k,
/// each projection onto the intersection computed by Dykstra.
/// Returns w = u + v.
inline Vector lifted_projection(const std::vector<LiftedProjector>& sets, std::span<const double> m,
                                double tol = 1e-10, int max_iters = 20000)
{
    const auto n = m.size();
    Vector u(m.begin(), m.end()), v(n, 0.0);
    dykstra(sets, u, v);
    Vector yu = u, yv = v;
    double t = 1.0;
    // Gradient of the objective in (u, v) is (r, r) with r = u + v - m; Lipschitz constant 2.
    const double step = 0.5;
    for (int it = 0; it < max_iters; ++it) {
        Vector nu(n), nv(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double r = yu[i] + yv[i] - m[i];
            nu[i] = yu[i] - step * r;
            nv[i] = yv[i] - step * r;
        }
        dykstra(sets, nu, nv);
        const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        double change = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            change = std::max(change, std::abs(nu[i] + nv[i] - u[i] - v[i]));
            yu[i] = nu[i] + (t - 1.0) / tn * (nu[i] - u[i]);
            yv[i] = nv[i] + (t - 1.0) / tn * (nv[i] - v[i]);
        }
        u = std::move(nu);
        v = std::move(nv);
        t = tn;
        if (change < tol && it > 50) {
            break;
        }
    }
    Vector w(n);
    for (std::size_t i = 0; i < n; ++i) {
        w[i] = u[i] + v[i];
    }
    return w;
}

/// Projection onto {(u, v) : u + v in F} given the projection onto F:
/// the correction P_F(s) - s is split evenly between the components.
inline LiftedProjector sum_constraint(std::function<Vector(const Vector&)> project_f)
{
    return [project_f](Vector& u, Vector& v) {
        Vector s(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) {
            s[i] = u[i] + v[i];
        }
        const auto ps = project_f(s);
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double half = 0.5 * (ps[i] - s[i]);
            u[i] += half;
            v[i] += half;
        }
    };
}

inline LiftedProjector component_boxes(Vector ulo, Vector uhi, Vector vlo, Vector vhi)
{
    return [=](Vector& u, Vector& v) {
        for (std::size_t i = 0; i < u.size(); ++i) {
            u[i] = std::clamp(u[i], ulo[i], uhi[i]);
            v[i] = std::clamp(v[i], vlo[i], vhi[i]);
        }
    };
}

/// Closed-form projections used only inside the reference solvers.
inline Vector clamp_all(const Vector& x, double lo, double hi)
{
    Vector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = std::clamp(x[i], lo, hi);
    }
    return out;
}

inline Vector l2_ball(const Vector& x, double sigma)
{
    const double n = norm(x);
    if (n <= sigma) {
        return x;
    }
    Vector out(x);
    for (auto& v : out) {
        v *= sigma / n;
    }
    return out;
}

} // namespace testing
