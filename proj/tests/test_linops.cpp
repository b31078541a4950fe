#include <doctest.h>

#include <random>

#include "minkproj/block_system.hpp"
#include "minkproj/cg.hpp"
#include "minkproj/error.hpp"
#include "minkproj/operators.hpp"
#include "support.hpp"

using namespace minkproj;
using testing::dot;
using testing::random_vector;

namespace {

SparseMatrix random_sparse(std::mt19937_64& rng, std::size_t rows, std::size_t cols, double density)
{
    std::uniform_real_distribution<double> u(0.0, 1.0), val(-2.0, 2.0);
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            if (u(rng) < density) {
                t.push_back({i, j, val(rng)});
            }
        }
    }
    return SparseMatrix::from_triplets(rows, cols, std::move(t));
}

double adjoint_error(const SparseMatrix& a, std::mt19937_64& rng)
{
    const auto x = random_vector(rng, a.cols());
    const auto y = random_vector(rng, a.rows());
    const double lhs = dot(a.matvec(x), y);
    const double rhs = dot(x, a.rmatvec(y));
    return std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-300});
}

void check_csr_invariants(const SparseMatrix& a)
{
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (auto k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k) {
            CHECK(a.values()[k] != 0.0);
            if (k > a.row_ptr()[i]) {
                CHECK(a.col_idx()[k] > a.col_idx()[k - 1]);
            }
        }
    }
}

GeneralizedMinkowskiSpec bounds_spec(const ModelGrid& g)
{
    GeneralizedMinkowskiSpec s(g);
    s.add({Target::component_u, LinearOperatorSpec::identity(), ElementarySet::box(-1.0, 1.0), "u box"});
    s.add({Target::component_v, LinearOperatorSpec::identity(), ElementarySet::box(-1.0, 1.0), "v box"});
    return s;
}

/// Dense A_i of block row i, placed into the 2N columns of x = (u; v).
Eigen::MatrixXd placed(const BlockRow& row, std::size_t n)
{
    const auto a = row.op.to_dense();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(a.rows(), static_cast<Eigen::Index>(2 * n));
    const auto nn = static_cast<Eigen::Index>(n);
    if (row.placement != Target::component_v) {
        out.leftCols(nn) = a;
    }
    if (row.placement != Target::component_u) {
        out.rightCols(nn) = a;
    }
    return out;
}

GeneralizedMinkowskiSpec mixed_spec(const ModelGrid& g)
{
    auto s = bounds_spec(g);
    s.add({Target::sum, LinearOperatorSpec::gradient(), ElementarySet::l1_ball(3.0), "tv"});
    s.add({Target::component_u, LinearOperatorSpec::derivative(0), ElementarySet::box(0.0, INFINITY), "monotone"});
    s.add({Target::component_v, LinearOperatorSpec::derivative(1), ElementarySet::l2_ball(1.0), "smooth"});
    return s;
}

} // namespace

TEST_CASE("first difference on a 3x1 grid")
{
    ModelGrid g({3, 1});
    const auto d = build_derivative(g, 0);
    CHECK(d.rows() == 2);
    CHECK(d.matvec(Vector{1, 4, 9}) == Vector{3, 5});
    CHECK_THROWS_AS(build_derivative(g, 1), ShapeError);
}

TEST_CASE("derivatives annihilate constants")
{
    for (const auto& dims : {std::vector<std::size_t>{4, 5}, std::vector<std::size_t>{3, 4, 2}}) {
        ModelGrid g(dims);
        for (std::size_t a = 0; a < dims.size(); ++a) {
            const auto y = build_derivative(g, a).matvec(Vector(g.size(), 3.5));
            CHECK(testing::norm(y) == 0.0);
            CHECK(y.size() == g.size() / dims[a] * (dims[a] - 1));
        }
    }
}

TEST_CASE("derivatives match the dense Kronecker construction")
{
    std::mt19937_64 rng(3);
    for (const auto& dims : {std::vector<std::size_t>{4, 5}, std::vector<std::size_t>{6, 7}, std::vector<std::size_t>{2, 7},
                             std::vector<std::size_t>{3, 4, 5}}) {
        ModelGrid g(dims);
        for (std::size_t a = 0; a < dims.size(); ++a) {
            const auto d = build_derivative(g, a);
            const auto ref = testing::dense_derivative(dims, a);
            CHECK((d.to_dense() - ref).cwiseAbs().maxCoeff() == 0.0);
            const auto x = random_vector(rng, g.size());
            const auto y = d.matvec(x);
            const Eigen::VectorXd yr = ref * testing::to_eigen(x);
            CHECK((testing::to_eigen(y) - yr).cwiseAbs().maxCoeff() < 1e-14);
            check_csr_invariants(d);
        }
    }
}

TEST_CASE("gradient stacks the per-axis derivatives")
{
    ModelGrid g({4, 5});
    const auto grad = build_gradient(g, {0, 1});
    Eigen::MatrixXd ref(grad.rows(), grad.cols());
    ref << testing::dense_derivative({4, 5}, 0), testing::dense_derivative({4, 5}, 1);
    CHECK((grad.to_dense() - ref).cwiseAbs().maxCoeff() == 0.0);
    CHECK(LinearOperatorSpec::gradient().output_size(g) == 3 * 5 + 4 * 4);
}

TEST_CASE("adjoint identity for every operator")
{
    std::mt19937_64 rng(4);
    ModelGrid g({5, 6, 3});
    std::vector<SparseMatrix> ops = {SparseMatrix::identity(g.size()), build_derivative(g, 0), build_derivative(g, 1),
                                     build_derivative(g, 2), build_gradient(g, {0, 1, 2}),
                                     random_sparse(rng, 37, g.size(), 0.1), random_sparse(rng, g.size(), 11, 0.3)};
    for (const auto& a : ops) {
        for (int k = 0; k < 5; ++k) {
            CHECK(adjoint_error(a, rng) < 1e-12);
        }
    }
}

TEST_CASE("identity and zero matrices")
{
    std::mt19937_64 rng(5);
    const auto x = random_vector(rng, 9);
    CHECK(SparseMatrix::identity(9).matvec(x) == x);
    CHECK(SparseMatrix::identity(9).is_identity());
    const SparseMatrix z(4, 9);
    CHECK(z.matvec(x) == Vector(4, 0.0));
    CHECK(z.nnz() == 0);
    CHECK_THROWS_AS(z.matvec(Vector(3, 1.0)), ShapeError);
}

TEST_CASE("triplet assembly sums duplicates and drops cancellations")
{
    const auto a = SparseMatrix::from_triplets(2, 3, {{0, 2, 1.0}, {0, 0, 2.0}, {0, 2, 3.0}, {1, 1, 1.0}, {1, 1, -1.0}});
    CHECK(a.nnz() == 2);
    CHECK(a.to_dense()(0, 2) == 4.0);
    check_csr_invariants(a);
    CHECK_THROWS_AS(SparseMatrix::from_triplets(2, 2, {{2, 0, 1.0}}), ShapeError);
}

TEST_CASE("transpose and gram agree with dense products")
{
    std::mt19937_64 rng(6);
    const auto a = random_sparse(rng, 13, 8, 0.3);
    CHECK((a.transpose().to_dense() - a.to_dense().transpose()).cwiseAbs().maxCoeff() == 0.0);
    const Eigen::MatrixXd g = a.to_dense().transpose() * a.to_dense();
    CHECK((a.gram().to_dense() - g).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("compressed-diagonal view reproduces CSR matvec")
{
    std::mt19937_64 rng(7);
    ModelGrid g({6, 7});
    const auto d = build_gradient(g, {0, 1}).gram();
    auto banded = d;
    banded.build_diagonal_view();
    REQUIRE(banded.has_diagonal_view());
    const auto x = random_vector(rng, g.size());
    Vector y1(g.size()), y2(g.size());
    banded.matvec(x, y1);
    d.matvec_csr(x, y2);
    CHECK(testing::rel_dist(y1, y2) <= 1e-14);
    CHECK(d.bandwidth() == 6);
}

TEST_CASE("block system rows follow D, E, F, then (I, I)")
{
    ModelGrid g({2, 3});
    const auto bs = assemble_block_system(bounds_spec(g));
    REQUIRE(bs.s() == 3);
    CHECK(bs.row(0).placement == Target::component_u);
    CHECK(bs.row(1).placement == Target::component_v);
    CHECK(bs.row(2).placement == Target::sum);
    CHECK(bs.row(2).identity);
    CHECK_FALSE(bs.row(2).set.has_value());

    auto spec = bounds_spec(g);
    spec.add({Target::sum, LinearOperatorSpec::identity(), ElementarySet::box(-1.0, 2.0), "F box"});
    spec.add({Target::sum, LinearOperatorSpec::gradient(), ElementarySet::l1_ball(1.0), "tv"});
    CHECK(assemble_block_system(spec).s() == 5);
}

TEST_CASE("stacked operator matches the row-by-row dense oracle")
{
    std::mt19937_64 rng(8);
    ModelGrid g({4, 5});
    const auto bs = assemble_block_system(mixed_spec(g));
    const auto x = random_vector(rng, 2 * g.size());
    const auto y = bs.apply(x);
    std::size_t offset = 0;
    for (const auto& row : bs.rows()) {
        const Eigen::VectorXd ref = placed(row, g.size()) * testing::to_eigen(x);
        for (Eigen::Index k = 0; k < ref.size(); ++k) {
            CHECK(std::abs(y[offset + static_cast<std::size_t>(k)] - ref(k)) < 1e-13);
        }
        offset += static_cast<std::size_t>(ref.size());
    }
    CHECK(offset == y.size());
}

TEST_CASE("Q for identity bounds with unit rho is [[2I, I], [I, 2I]]")
{
    ModelGrid g({2, 2});
    const auto bs = assemble_block_system(bounds_spec(g));
    const std::vector<double> rho(bs.s(), 1.0);
    const auto q = assemble_Q(bs, rho).to_dense();
    const auto i4 = Eigen::MatrixXd::Identity(4, 4);
    Eigen::MatrixXd ref(8, 8);
    ref << 2 * i4, i4, i4, 2 * i4;
    CHECK((q - ref).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Q matches the row-wise Gram oracle, is symmetric and reassembles exactly")
{
    std::mt19937_64 rng(9);
    ModelGrid g({4, 5});
    const auto bs = assemble_block_system(mixed_spec(g));
    std::uniform_real_distribution<double> r(0.2, 5.0);
    std::vector<double> rho(bs.s());
    for (auto& v : rho) {
        v = r(rng);
    }
    GramAssembler asm_(bs, banded_limit(g));
    auto q = asm_.assemble(rho);
    const auto qd = q.to_dense();
    CHECK((qd - qd.transpose()).cwiseAbs().maxCoeff() == 0.0);

    Eigen::MatrixXd ref = Eigen::MatrixXd::Zero(qd.rows(), qd.cols());
    for (std::size_t i = 0; i < bs.s(); ++i) {
        const auto a = placed(bs.row(i), g.size());
        ref += rho[i] * a.transpose() * a;
    }
    CHECK((qd - ref).cwiseAbs().maxCoeff() <= 1e-12 * ref.cwiseAbs().maxCoeff());

    // Row-wise matvec oracle: sum_i rho_i A_i^T (A_i x).
    const auto x = random_vector(rng, 2 * g.size());
    Vector ax(2 * g.size(), 0.0);
    for (std::size_t i = 0; i < bs.s(); ++i) {
        const auto a = placed(bs.row(i), g.size());
        const Eigen::VectorXd part = rho[i] * a.transpose() * (a * testing::to_eigen(x));
        for (std::size_t k = 0; k < ax.size(); ++k) {
            ax[k] += part(static_cast<Eigen::Index>(k));
        }
    }
    CHECK(testing::rel_dist(q.matvec(x), ax) < 1e-12);

    for (auto& v : rho) {
        v *= 3.0;
    }
    asm_.update(q, rho);
    CHECK((q.to_dense() - 3.0 * qd).cwiseAbs().maxCoeff() <= 1e-12 * qd.cwiseAbs().maxCoeff());
    CHECK((q.to_dense() - assemble_Q(bs, rho).to_dense()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Q is positive definite with identity bounds on both components")
{
    ModelGrid g({4, 5});
    const auto bs = assemble_block_system(mixed_spec(g));
    const std::vector<double> rho(bs.s(), 1.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(assemble_Q(bs, rho).to_dense());
    CHECK(eig.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("Q assembly rejects non-positive rho")
{
    ModelGrid g({2, 2});
    const auto bs = assemble_block_system(bounds_spec(g));
    CHECK_THROWS_AS(assemble_Q(bs, std::vector<double>{1.0, 0.0, 1.0}), SpecError);
    CHECK_THROWS_AS(assemble_Q(bs, std::vector<double>{1.0, 1.0}), SpecError);
}

TEST_CASE("CG on 2I solves in one iteration; warm start at the solution takes none")
{
    const auto q = SparseMatrix::diagonal(Vector(6, 2.0));
    const Vector b{2, 4, 6, 8, 10, 12};
    Vector x(6, 0.0);
    auto r = conjugate_gradient(q, b, x);
    CHECK(r.iterations == 1);
    CHECK(x == Vector{1, 2, 3, 4, 5, 6});
    r = conjugate_gradient(q, b, x);
    CHECK(r.iterations == 0);
    CHECK(r.converged);
}

TEST_CASE("CG matches a dense solve; energy decreases monotonically")
{
    std::mt19937_64 rng(10);
    const auto a = random_sparse(rng, 30, 20, 0.3);
    auto q = a.gram();
    // Shift to make it well posed regardless of the draw.
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < 20; ++i) {
        t.push_back({i, i, 0.5});
    }
    const Eigen::MatrixXd qd = q.to_dense() + SparseMatrix::from_triplets(20, 20, t).to_dense();
    std::vector<Triplet> all;
    for (Eigen::Index i = 0; i < 20; ++i) {
        for (Eigen::Index j = 0; j < 20; ++j) {
            if (qd(i, j) != 0.0) {
                all.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), qd(i, j)});
            }
        }
    }
    q = SparseMatrix::from_triplets(20, 20, all);
    const auto b = random_vector(rng, 20);
    Vector x(20, 0.0);
    CgOptions opts;
    opts.tol = 1e-12;
    opts.max_iters = 200;
    opts.record_energy = true;
    const auto r = conjugate_gradient(q, b, x, opts);
    CHECK(r.converged);
    const Eigen::VectorXd ref = qd.llt().solve(testing::to_eigen(b));
    CHECK((testing::to_eigen(x) - ref).norm() <= 1e-7 * ref.norm());
    for (std::size_t k = 1; k < r.energy_history.size(); ++k) {
        CHECK(r.energy_history[k] <= r.energy_history[k - 1] + 1e-12 * std::abs(r.energy_history[k - 1]));
    }
}

TEST_CASE("CG reports non-positive curvature")
{
    const auto q = SparseMatrix::diagonal(Vector{1.0, -1.0});
    Vector x(2, 0.0);
    CHECK_THROWS_AS(conjugate_gradient(q, Vector{0.0, 1.0}, x), SolverError);
}
