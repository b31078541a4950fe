#include <doctest.h>

#include <random>

#include "minkproj/admm.hpp"
#include "minkproj/error.hpp"
#include "minkproj/spg.hpp"
#include "support.hpp"

using namespace minkproj;
using testing::dist;
using testing::random_vector;

namespace {

ObjectiveOracle proximity(Vector target)
{
    return [t = std::move(target)](const ModelVector& m) {
        Evaluation e{0.0, Vector(m.size())};
        for (std::size_t i = 0; i < m.size(); ++i) {
            e.gradient[i] = m[i] - t[i];
            e.value += 0.5 * e.gradient[i] * e.gradient[i];
        }
        return e;
    };
}

/// f(x) = 1/2 x'Hx - b'x.
ObjectiveOracle quadratic(Eigen::MatrixXd h, Eigen::VectorXd b)
{
    return [h = std::move(h), b = std::move(b)](const ModelVector& m) {
        const auto x = testing::to_eigen(m.values());
        const Eigen::VectorXd g = h * x - b;
        return Evaluation{0.5 * x.dot(h * x) - b.dot(x), testing::from_eigen(g)};
    };
}

Eigen::MatrixXd random_spd(std::mt19937_64& rng, Eigen::Index n, double shift)
{
    Eigen::MatrixXd a(n, n);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            a(i, j) = u(rng);
        }
    }
    return a.transpose() * a + shift * Eigen::MatrixXd::Identity(n, n);
}

/// Minimizer of 1/2 x'Hx - b'x over lo <= x <= hi by trying every
/// assignment of each coordinate to {free, lower, upper} and keeping the one
/// that satisfies the KKT conditions.
Eigen::VectorXd box_qp_enumerate(const Eigen::MatrixXd& h, const Eigen::VectorXd& b, double lo, double hi)
{
    const auto n = h.rows();
    std::size_t total = 1;
    for (Eigen::Index i = 0; i < n; ++i) {
        total *= 3;
    }
    for (std::size_t code = 0; code < total; ++code) {
        std::vector<int> state(static_cast<std::size_t>(n));
        auto c = code;
        for (auto& s : state) {
            s = static_cast<int>(c % 3);
            c /= 3;
        }
        Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
        std::vector<Eigen::Index> free;
        for (Eigen::Index i = 0; i < n; ++i) {
            const int s = state[static_cast<std::size_t>(i)];
            if (s == 0) {
                free.push_back(i);
            } else {
                x(i) = s == 1 ? lo : hi;
            }
        }
        if (!free.empty()) {
            const auto k = static_cast<Eigen::Index>(free.size());
            Eigen::MatrixXd hf(k, k);
            Eigen::VectorXd rhs(k);
            for (Eigen::Index a = 0; a < k; ++a) {
                rhs(a) = b(free[a]);
                for (Eigen::Index j = 0; j < n; ++j) {
                    if (state[static_cast<std::size_t>(j)] != 0) {
                        rhs(a) -= h(free[a], j) * x(j);
                    }
                }
                for (Eigen::Index bb = 0; bb < k; ++bb) {
                    hf(a, bb) = h(free[a], free[bb]);
                }
            }
            const Eigen::VectorXd xf = hf.llt().solve(rhs);
            for (Eigen::Index a = 0; a < k; ++a) {
                x(free[a]) = xf(a);
            }
        }
        const Eigen::VectorXd g = h * x - b;
        bool kkt = true;
        for (Eigen::Index i = 0; i < n && kkt; ++i) {
            const int s = state[static_cast<std::size_t>(i)];
            if (s == 0) {
                kkt = x(i) >= lo - 1e-12 && x(i) <= hi + 1e-12;
            } else if (s == 1) {
                kkt = g(i) >= -1e-12;
            } else {
                kkt = g(i) <= 1e-12;
            }
        }
        if (kkt) {
            return x;
        }
    }
    throw std::runtime_error("no KKT point found");
}

GeneralizedMinkowskiSpec box_only(const ModelGrid& g, double lo, double hi)
{
    GeneralizedMinkowskiSpec s(g);
    s.add({Target::component_u, LinearOperatorSpec::identity(), ElementarySet::box(lo, hi), "u box"});
    s.add({Target::component_v, LinearOperatorSpec::identity(), ElementarySet::fixed(0.0), "v zero"});
    return s;
}

GeneralizedMinkowskiSpec tv_spec(const ModelGrid& g)
{
    GeneralizedMinkowskiSpec s(g);
    s.add({Target::component_u, LinearOperatorSpec::identity(), ElementarySet::box(-1.0, 1.0), "u box"});
    s.add({Target::component_v, LinearOperatorSpec::identity(), ElementarySet::box(-1.0, 1.0), "v box"});
    s.add({Target::sum, LinearOperatorSpec::gradient(), ElementarySet::l1_ball(3.0), "tv"});
    return s;
}

AdmmOptions tight()
{
    AdmmOptions o;
    o.eps_primal = o.eps_dual = 1e-8;
    o.max_iters = 20000;
    return o;
}

} // namespace

TEST_CASE("proximity objective with a feasible target returns the target")
{
    std::mt19937_64 rng(1);
    ModelGrid g({6, 5});
    const auto spec = tv_spec(g);
    const auto t = admm_project(ModelVector(g, random_vector(rng, g.size(), -2.0, 2.0)), spec, tight()).w;
    const auto r = spg_minimize(proximity(t.values()), ModelVector(g, random_vector(rng, g.size(), -2.0, 2.0)), spec,
                                SpgOptions{}, tight());
    CHECK(r.history.size() <= 15);
    CHECK(dist(r.m.values(), t.values()) <= 1e-3 * std::max(testing::norm(t.values()), 1.0));
}

TEST_CASE("proximity objective with an infeasible target returns its projection")
{
    std::mt19937_64 rng(2);
    ModelGrid g({6, 5});
    const auto spec = tv_spec(g);
    const auto z = random_vector(rng, g.size(), -3.0, 3.0);
    const auto pz = admm_project(ModelVector(g, z), spec, tight()).w;
    SpgOptions o;
    o.keep_iterates = true;
    const auto r = spg_minimize(proximity(z), ModelVector::zeros(g), spec, o, tight());
    CHECK(dist(r.m.values(), pz.values()) <= 1e-3 * testing::norm(pz.values()));

    // Every accepted iterate is feasible.
    for (const auto& h : r.history) {
        CHECK(h.feasibility <= o.feasibility_tol);
        CHECK(h.alpha >= o.alpha_min);
        CHECK(h.alpha <= o.alpha_max);
    }
    for (const auto& m : r.iterates) {
        CHECK(feasibility_distance(m, ElementarySet::l1_ball(3.0), LinearOperatorSpec::gradient()) <= 1e-4);
    }
}

TEST_CASE("box-constrained quadratic matches active-set enumeration")
{
    std::mt19937_64 rng(3);
    ModelGrid g({3, 2});
    for (int trial = 0; trial < 5; ++trial) {
        const auto h = random_spd(rng, 6, 0.1);
        const Eigen::VectorXd b = 3.0 * testing::to_eigen(random_vector(rng, 6));
        const auto ref = box_qp_enumerate(h, b, -0.5, 0.5);

        SpgOptions o;
        o.max_iters = 500;
        o.stationarity_tol = 1e-12;
        const auto exact = spg_minimize(quadratic(h, b), ModelVector::zeros(g),
                                        [](const ModelVector& m) {
                                            return ModelVector(m.grid(), testing::clamp_all(m.values(), -0.5, 0.5));
                                        },
                                        o);
        CHECK((testing::to_eigen(exact.m.values()) - ref).cwiseAbs().maxCoeff() <= 1e-6);

        AdmmOptions a;
        // Tolerances below the CG tolerance need a tighter inner solve.
        a.eps_primal = a.eps_dual = 1e-11;
        a.cg_tol = 1e-14;
        a.max_iters = 50000;
        const auto viaspec = spg_minimize(quadratic(h, b), ModelVector::zeros(g), box_only(g, -0.5, 0.5), o, a);
        CHECK((testing::to_eigen(viaspec.m.values()) - ref).cwiseAbs().maxCoeff() <= 1e-6);
    }
}

TEST_CASE("with a fixed small step, SPG reproduces plain projected gradient")
{
    std::mt19937_64 rng(4);
    ModelGrid g({4, 4});
    const auto h = random_spd(rng, 16, 0.5);
    const Eigen::VectorXd b = testing::to_eigen(random_vector(rng, 16));
    const double lmax = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h).eigenvalues().maxCoeff();
    const auto f = quadratic(h, b);
    const auto clamp = [](const ModelVector& m) { return ModelVector(m.grid(), testing::clamp_all(m.values(), -0.2, 0.3)); };

    // BB1 steps are at least 1/lmax, so alpha_max below that pins the step.
    SpgOptions o;
    o.alpha_max = 0.5 / lmax;
    o.alpha_min = 1e-3 * o.alpha_max;
    o.max_iters = 40;
    o.keep_iterates = true;
    o.stationarity_tol = 0.0;
    const auto m0 = ModelVector(g, Vector(16, 0.1));
    REQUIRE(1.0 / testing::norm(f(m0).gradient) >= o.alpha_max);
    const auto r = spg_minimize(f, m0, clamp, o);
    REQUIRE(r.iterates.size() == 40);

    auto m = clamp(m0);
    for (std::size_t k = 0; k < 40; ++k) {
        const auto grad = f(m).gradient;
        Vector next(16);
        for (std::size_t i = 0; i < 16; ++i) {
            next[i] = m[i] - o.alpha_max * grad[i];
        }
        m = clamp(ModelVector(g, next));
        CHECK(r.history[k].gamma == 1.0);
        CHECK(r.history[k].alpha == o.alpha_max);
        CHECK(dist(r.iterates[k].values(), m.values()) <= 1e-12);
    }
}

TEST_CASE("nonmonotone acceptance: every accepted value is below the recent maximum")
{
    std::mt19937_64 rng(5);
    ModelGrid g({5, 4});
    const auto h = random_spd(rng, 20, 0.01);
    const Eigen::VectorXd b = 5.0 * testing::to_eigen(random_vector(rng, 20));
    SpgOptions o;
    o.max_iters = 60;
    const auto r = spg_minimize(quadratic(h, b), ModelVector::zeros(g),
                                [](const ModelVector& m) { return ModelVector(m.grid(), testing::clamp_all(m.values(), -1.0, 1.0)); },
                                o);
    std::vector<double> values{r.f0};
    for (const auto& it : r.history) {
        const auto first = values.size() > o.ls_memory ? values.end() - static_cast<std::ptrdiff_t>(o.ls_memory)
                                                       : values.begin();
        CHECK(it.f <= *std::max_element(first, values.end()));
        values.push_back(it.f);
    }
}

TEST_CASE("an ascent direction stops with a warning")
{
    ModelGrid g({2, 1});
    // The projector ignores its input and returns a point uphill of m.
    const auto uphill = [](const ModelVector& m) { return ModelVector(m.grid(), Vector{1.0, 1.0}); };
    int calls = 0;
    const auto proj = [&](const ModelVector& m) { return ++calls == 1 ? ModelVector(m.grid(), Vector{0.0, 0.0}) : uphill(m); };
    const auto r = spg_minimize(proximity(Vector{-1.0, -1.0}), ModelVector::zeros(g), proj);
    CHECK(r.status == SpgStatus::non_descent);
    CHECK_FALSE(r.warnings.empty());
}

TEST_CASE("stationary start stops immediately")
{
    ModelGrid g({2, 2});
    const auto r = spg_minimize(proximity(Vector(4, 0.5)), ModelVector::constant(g, 0.5),
                                [](const ModelVector& m) { return m; });
    CHECK(r.status == SpgStatus::stationary);
    CHECK(r.history.empty());
}

TEST_CASE("option checks")
{
    SpgOptions o;
    o.alpha_min = 2.0;
    o.alpha_max = 1.0;
    CHECK_THROWS_AS(check_options(o), SpecError);
    o = {};
    o.ls_memory = 0;
    CHECK_THROWS_AS(check_options(o), SpecError);
    o = {};
    o.sufficient_decrease = 1.0;
    CHECK_THROWS_AS(check_options(o), SpecError);
}

TEST_CASE("gradient check")
{
    std::mt19937_64 rng(6);
    ModelGrid g({4, 3});
    const auto m = ModelVector(g, random_vector(rng, g.size()));
    const auto h = random_spd(rng, 12, 0.5);
    const Eigen::VectorXd b = testing::to_eigen(random_vector(rng, 12));
    CHECK(gradient_check(quadratic(h, b), m, 10, 1) < 1e-8);

    const auto doubled = [q = quadratic(h, b)](const ModelVector& x) {
        auto e = q(x);
        for (auto& v : e.gradient) {
            v *= 2.0;
        }
        return e;
    };
    CHECK(gradient_check(doubled, m, 10, 1) == doctest::Approx(0.5).epsilon(1e-4));

    const auto sines = [](const ModelVector& x) {
        Evaluation e{0.0, Vector(x.size())};
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double a = 1.0 + 0.3 * static_cast<double>(i);
            e.value += std::sin(a * x[i]) + 0.5 * std::sin(x[i] * x[(i + 1) % x.size()]);
        }
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double a = 1.0 + 0.3 * static_cast<double>(i);
            const auto next = (i + 1) % x.size();
            const auto prev = (i + x.size() - 1) % x.size();
            e.gradient[i] = a * std::cos(a * x[i]) + 0.5 * std::cos(x[i] * x[next]) * x[next]
                            + 0.5 * std::cos(x[prev] * x[i]) * x[prev];
        }
        return e;
    };
    CHECK(gradient_check(sines, m, 10, 2) < 1e-5);
}
