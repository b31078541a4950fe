#include <benchmark/benchmark.h>

#include "minkproj/block_system.hpp"
#include "minkproj/operators.hpp"

using namespace minkproj;

namespace {

/// Q for boxes on u and v plus total variation on the sum.
SparseMatrix tv_system(std::size_t side, bool banded)
{
    ModelGrid g({side, side});
    GeneralizedMinkowskiSpec s(g);
    s.add({Target::component_u, LinearOperatorSpec::identity(), ElementarySet::box(-1.0, 1.0), "u"});
    s.add({Target::component_v, LinearOperatorSpec::identity(), ElementarySet::box(-1.0, 1.0), "v"});
    s.add({Target::sum, LinearOperatorSpec::gradient(), ElementarySet::l1_ball(1.0), "tv"});
    const BlockSystem bs(s);
    const std::vector<double> rho(bs.s(), 1.0);
    return GramAssembler(bs, banded ? banded_limit(g) : 0).assemble(rho);
}

void run(benchmark::State& state, bool banded)
{
    const auto side = static_cast<std::size_t>(state.range(0));
    const auto q = tv_system(side, banded);
    if (banded && !q.has_diagonal_view()) {
        state.SkipWithError("no diagonal view");
        return;
    }
    Vector x(q.cols(), 1.0), y(q.rows());
    for (auto _ : state) {
        if (banded) {
            q.matvec(x, y);
        } else {
            q.matvec_csr(x, y);
        }
        benchmark::DoNotOptimize(y.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(q.nnz()));
}

} // namespace

static void BM_q_matvec_csr(benchmark::State& state)
{
    run(state, false);
}
BENCHMARK(BM_q_matvec_csr)->Arg(64)->Arg(256)->Arg(512);

static void BM_q_matvec_diagonal(benchmark::State& state)
{
    run(state, true);
}
BENCHMARK(BM_q_matvec_diagonal)->Arg(64)->Arg(256)->Arg(512);

static void BM_gradient_apply(benchmark::State& state)
{
    const auto side = static_cast<std::size_t>(state.range(0));
    ModelGrid g({side, side});
    const auto d = build_gradient(g, {0, 1});
    Vector x(g.size(), 1.0), y(d.rows());
    for (auto _ : state) {
        d.matvec(x, y);
        benchmark::DoNotOptimize(y.data());
    }
}
BENCHMARK(BM_gradient_apply)->Arg(256)->Arg(1024);
