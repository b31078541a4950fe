#include <doctest.h>

#include <random>

#include "minkproj/error.hpp"
#include "minkproj/operators.hpp"
#include "minkproj/prox.hpp"
#include "support.hpp"

using namespace minkproj;
using testing::dist;
using testing::dot;
using testing::norm;
using testing::random_vector;

namespace {

Eigen::MatrixXd random_orthonormal(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols)
{
    Eigen::MatrixXd a(rows, cols);
    std::normal_distribution<double> g;
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            a(i, j) = g(rng);
        }
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    return qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
}

/// One instance of every kind on vectors of length 12, with a feasible-point generator for convex ones.
struct Case {
    std::string name;
    ElementarySet set;
};

std::vector<Case> all_cases(std::mt19937_64& rng)
{
    const auto obs = random_vector(rng, 12);
    Vector lo(12), hi(12);
    for (std::size_t i = 0; i < 12; ++i) {
        lo[i] = -0.3 - 0.05 * static_cast<double>(i);
        hi[i] = 0.2 + 0.03 * static_cast<double>(i);
    }
    return {
        {"box", ElementarySet::box(lo, hi)},
        {"box scalar", ElementarySet::box(-0.5, 0.25)},
        {"fixed", ElementarySet::fixed(0.75)},
        {"l1", ElementarySet::l1_ball(1.5)},
        {"l2", ElementarySet::l2_ball(0.8, random_vector(rng, 12))},
        {"annulus", ElementarySet::l2_annulus(1.0, 2.0)},
        {"cardinality", ElementarySet::cardinality(3)},
        {"cardinality sliced", ElementarySet::cardinality(2, contiguous_slices(12, 4))},
        {"rank", ElementarySet::rank(1, 4, 3)},
        {"subspace", ElementarySet::subspace(random_orthonormal(rng, 12, 4))},
        {"datafit", ElementarySet::pointwise_datafit(obs, -0.1, 0.2)},
    };
}

} // namespace

TEST_CASE("box projection examples")
{
    CHECK(project_box(Vector{2600}, 2350.0, 2550.0) == Vector{2550});
    CHECK(project_box(Vector{-200, -50}, -150.0, 0.0) == Vector{-150, -50});
    const Vector inside{0.1, -0.3};
    CHECK(project_box(inside, -1.0, 1.0) == inside);
    CHECK_THROWS_AS(ElementarySet::box(1.0, 0.0), SpecError);
    CHECK_THROWS_AS(ElementarySet::box(Vector{0.0, 2.0}, Vector{1.0, 1.0}), SpecError);
}

TEST_CASE("fixed projection examples")
{
    std::mt19937_64 rng(1);
    const auto y = random_vector(rng, 5, 0.0, 5000.0);
    const auto p = project_fixed(y, 2500.0);
    CHECK(p == Vector(5, 2500.0));
    CHECK(project_fixed(p, 2500.0) == p);
    const auto set = ElementarySet::fixed(2500.0);
    CHECK(dist(y, set.project(y)) == doctest::Approx(dist(y, Vector(5, 2500.0))).epsilon(1e-15));
}

TEST_CASE("l1-ball projection")
{
    const Vector inside{0.5, -0.25, 0.1};
    CHECK(project_l1_ball(inside, 1.0) == inside);
    CHECK(project_l1_ball(Vector{3.0, -1.0}, 0.0) == Vector{0.0, 0.0});

    const Vector y{3.0, -1.0};
    CHECK(dist(project_l1_ball(y, 2.0), testing::l1_ball_bisection(y, 2.0)) <= 1e-10);

    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        const auto x = random_vector(rng, 40, -3.0, 3.0);
        const double sigma = 0.5 + 10.0 * static_cast<double>(trial) / 50.0;
        const auto p = project_l1_ball(x, sigma);
        CHECK(testing::l1(p) <= sigma * (1.0 + 1e-12));
        CHECK(dist(p, testing::l1_ball_bisection(x, sigma)) <= 1e-10);
    }
    CHECK_THROWS_AS(ElementarySet::l1_ball(-1.0), SpecError);
}

TEST_CASE("l2-annulus projection")
{
    const Vector y{6.0, 8.0};
    const auto p = project_l2_annulus(y, 0.0, 5.0);
    CHECK(dist(p, Vector{3.0, 4.0}) <= 1e-15);

    const Vector c{1.0, 1.0};
    const Vector mid{2.0, 2.5};
    CHECK(project_l2_annulus(mid, 1.0, 3.0, c) == mid);
    CHECK(project_l2_annulus(c, 1.0, 3.0, c) == Vector{2.0, 1.0});

    const auto hole = project_l2_annulus(Vector{0.3, 0.4}, 1.0, 2.0);
    CHECK(dist(hole, Vector{0.6, 0.8}) <= 1e-15);
    CHECK_THROWS_AS(ElementarySet::l2_annulus(2.0, 2.0), SpecError);
    CHECK_THROWS_AS(ElementarySet::l2_annulus(-1.0, 2.0), SpecError);
}

TEST_CASE("cardinality projection")
{
    const Vector y{5.0, -7.0, 1.0};
    CHECK(project_cardinality(y, 3) == y);
    CHECK(project_cardinality(y, 1) == Vector{0.0, -7.0, 0.0});
    CHECK(project_cardinality(Vector{2.0, -2.0, 2.0}, 2) == Vector{2.0, -2.0, 0.0});

    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const auto x = random_vector(rng, 8);
        const auto p = project_cardinality(x, 3);
        const double err = dist(x, p);
        CHECK(err * err == doctest::Approx(testing::cardinality_exhaustive(x, 3)).epsilon(1e-12));
    }

    const auto slices = contiguous_slices(6, 3);
    CHECK(project_cardinality(Vector{1, 3, 2, -6, 5, 4}, 1, slices) == Vector{0, 3, 0, -6, 0, 0});
    CHECK_THROWS_AS(ElementarySet::cardinality(4, contiguous_slices(6, 3)).project(Vector(6, 1.0)), SpecError);
    CHECK_FALSE(ElementarySet::cardinality(4).check(3).empty());
}

TEST_CASE("rank projection")
{
    std::mt19937_64 rng(4);
    ModelGrid g({6, 5});

    // Rank-2 input is left alone by r = 2 and r = 3.
    Eigen::MatrixXd low = Eigen::MatrixXd::Random(6, 2) * Eigen::MatrixXd::Random(2, 5);
    const auto m2 = dematricize_2d(g, low);
    CHECK(testing::rel_dist(project_rank(m2, 2).values(), m2.values()) <= 1e-10);
    CHECK(testing::rel_dist(project_rank(m2, 3).values(), m2.values()) <= 1e-10);

    // Eckart-Young: the rank-1 error of a rank-2 matrix is its second singular value.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd2(low);
    const auto p1 = project_rank(m2, 1);
    CHECK(dist(p1.values(), m2.values()) == doctest::Approx(svd2.singularValues()(1)).epsilon(1e-10));

    // Dense oracle on a random 6 x 5 matrix.
    const auto m = ModelVector(g, random_vector(rng, g.size()));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(matricize_2d(m), Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::MatrixXd ref = svd.matrixU().leftCols(2) * svd.singularValues().head(2).asDiagonal() *
                                svd.matrixV().leftCols(2).transpose();
    const auto p = project_rank(m, 2);
    CHECK((matricize_2d(p) - ref).norm() <= 1e-10 * ref.norm());
    Eigen::JacobiSVD<Eigen::MatrixXd> check(matricize_2d(p));
    CHECK(check.singularValues()(2) <= 1e-10 * check.singularValues()(0));

    CHECK_THROWS_AS(project_rank(m, 6), SpecError);
    CHECK_THROWS_AS(ElementarySet::rank(0, 6, 5), SpecError);
}

TEST_CASE("subspace projection")
{
    std::mt19937_64 rng(5);
    const auto u = random_orthonormal(rng, 10, 3);
    const auto y = random_vector(rng, 10);
    const auto p = project_subspace(y, u);
    Vector r(10);
    for (std::size_t i = 0; i < 10; ++i) {
        r[i] = y[i] - p[i];
    }
    CHECK((u.transpose() * testing::to_eigen(r)).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(testing::rel_dist(project_subspace(p, u), p) <= 1e-10);
    CHECK(testing::rel_dist(project_subspace(y, Eigen::MatrixXd::Identity(10, 10)), y) <= 1e-15);

    const Eigen::MatrixXd skew = 2.0 * u;
    CHECK_THROWS_AS(ElementarySet::subspace(skew), SpecError);

    // Built from raw training frames: every frame lies in the span.
    Eigen::MatrixXd frames = Eigen::MatrixXd::Random(10, 4);
    const auto set = ElementarySet::subspace_from_training(frames);
    for (Eigen::Index j = 0; j < 4; ++j) {
        const Vector f = testing::from_eigen(frames.col(j));
        CHECK(testing::rel_dist(set.project(f), f) <= 1e-10);
    }

    // Applied per block on a longer vector.
    const auto two = random_vector(rng, 20);
    const auto pp = set.project(two);
    const auto s = ElementarySet::subspace_from_training(frames);
    CHECK(testing::rel_dist(Vector(pp.begin(), pp.begin() + 10), s.project(std::span(two).first(10))) <= 1e-14);
}

TEST_CASE("pointwise data-fit projection")
{
    std::mt19937_64 rng(6);
    const auto d = random_vector(rng, 15);
    CHECK(project_pointwise_datafit(d, d, -0.1, 0.1) == d);
    CHECK(project_pointwise_datafit(random_vector(rng, 15), d, 0.0, 0.0) == d);

    const auto y = random_vector(rng, 15, -2.0, 2.0);
    const auto lo = random_vector(rng, 15, -0.5, 0.0);
    const auto hi = random_vector(rng, 15, 0.0, 0.5);
    Vector shifted(15);
    for (std::size_t i = 0; i < 15; ++i) {
        shifted[i] = y[i] - d[i];
    }
    auto ref = project_box(shifted, lo, hi);
    for (std::size_t i = 0; i < 15; ++i) {
        ref[i] += d[i];
    }
    CHECK(dist(project_pointwise_datafit(y, d, lo, hi), ref) <= 1e-15);
    CHECK_THROWS_AS(ElementarySet::pointwise_datafit(d, 0.1, -0.1), SpecError);
}

TEST_CASE("monotone derivative projection is a box with an open side")
{
    const Vector y{-0.5, 0.0, 3.0, 1e30};
    CHECK(project_monotone_derivative(y, 0.0, INFINITY) == Vector{0.0, 0.0, 3.0, 1e30});
    std::mt19937_64 rng(7);
    const auto x = random_vector(rng, 30, -5.0, 5.0);
    CHECK(project_monotone_derivative(x, -0.1, 0.1) == project_box(x, -0.1, 0.1));
    CHECK(project_monotone_derivative(x, 0.0, INFINITY) == project_box(x, 0.0, 1e300));
}

TEST_CASE("feasibility distance")
{
    const auto box = ElementarySet::box(-1.0, 1.0);
    CHECK(feasibility_distance(Vector{0.5, -0.5}, box, SparseMatrix::identity(2)) == 0.0);
    CHECK(feasibility_distance(Vector{1.0, 0.0, 0.0}, ElementarySet::fixed(0.0), SparseMatrix::identity(3)) == 1.0);

    std::mt19937_64 rng(8);
    ModelGrid g({5, 4});
    const auto m = ModelVector(g, random_vector(rng, g.size(), -3.0, 3.0));
    const auto set = ElementarySet::l1_ball(2.0);
    const auto tx = build_gradient(g, {0, 1}).matvec(m.values());
    const auto ptx = project_l1_ball(tx, 2.0);
    const double ref = dist(ptx, tx) / std::max(norm(tx), 1.0);
    CHECK(feasibility_distance(m, set, LinearOperatorSpec::gradient()) == doctest::Approx(ref).epsilon(1e-14));
}

TEST_CASE("every kind is idempotent")
{
    std::mt19937_64 rng(9);
    for (const auto& c : all_cases(rng)) {
        CAPTURE(c.name);
        for (int trial = 0; trial < 10; ++trial) {
            const auto y = random_vector(rng, 12, -3.0, 3.0);
            const auto p = c.set.project(y);
            const auto pp = c.set.project(p);
            CHECK(dist(p, pp) <= 1e-10 * std::max(norm(p), 1.0));
        }
    }
}

TEST_CASE("convex kinds are nonexpansive and satisfy the variational inequality")
{
    std::mt19937_64 rng(10);
    for (const auto& c : all_cases(rng)) {
        CAPTURE(c.name);
        CHECK(c.set.is_convex() == (c.name != "annulus" && c.name.rfind("cardinality", 0) != 0 && c.name != "rank"));
        if (!c.set.is_convex()) {
            continue;
        }
        for (int trial = 0; trial < 20; ++trial) {
            const auto a = random_vector(rng, 12, -3.0, 3.0);
            const auto b = random_vector(rng, 12, -3.0, 3.0);
            const auto pa = c.set.project(a);
            const auto pb = c.set.project(b);
            CHECK(dist(pa, pb) <= dist(a, b) + 1e-12);
            // Feasible z: the projection of another random point.
            const auto z = c.set.project(random_vector(rng, 12, -3.0, 3.0));
            Vector r(12), s(12);
            for (std::size_t i = 0; i < 12; ++i) {
                r[i] = a[i] - pa[i];
                s[i] = z[i] - pa[i];
            }
            CHECK(dot(r, s) <= 1e-10);
        }
    }
}

TEST_CASE("convexity flags")
{
    CHECK(ElementarySet::l2_annulus(0.0, 1.0).is_convex());
    CHECK_FALSE(ElementarySet::l2_annulus(0.5, 1.0).is_convex());
    CHECK_FALSE(ElementarySet::rank(1, 2, 2).is_convex());
    CHECK(ElementarySet::box(0.0, 1.0).is_convex());
}

TEST_CASE("parallel slice projection matches serial")
{
    std::mt19937_64 rng(11);
    const auto y = random_vector(rng, 600);
    const auto set = ElementarySet::cardinality(7, contiguous_slices(600, 60));
    Vector a(600), b(600);
    set.project(y, a, 1);
    set.project(y, b, 4);
    CHECK(a == b);
}
