#include <benchmark/benchmark.h>

#include <random>

#include "minkproj/prox.hpp"

using namespace minkproj;

namespace {

Vector draw(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vector v(n);
    for (auto& x : v) {
        x = u(rng);
    }
    return v;
}

void run(benchmark::State& state, const ElementarySet& set)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto y = draw(n, 1);
    Vector out(n);
    for (auto _ : state) {
        set.project(y, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

} // namespace

static void BM_box(benchmark::State& state)
{
    run(state, ElementarySet::box(-0.5, 0.5));
}
BENCHMARK(BM_box)->Range(1 << 10, 1 << 20);

static void BM_l1_ball(benchmark::State& state)
{
    run(state, ElementarySet::l1_ball(0.1 * static_cast<double>(state.range(0))));
}
BENCHMARK(BM_l1_ball)->Range(1 << 10, 1 << 20);

static void BM_cardinality_per_frame(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    run(state, ElementarySet::cardinality(48, contiguous_slices(n, 768)));
}
BENCHMARK(BM_cardinality_per_frame)->Arg(768 * 40)->Arg(768 * 400);

static void BM_rank(benchmark::State& state)
{
    const auto side = static_cast<std::size_t>(state.range(0));
    const auto set = ElementarySet::rank(5, side, side);
    const auto y = draw(side * side, 2);
    Vector out(side * side);
    for (auto _ : state) {
        set.project(y, out);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_rank)->Arg(32)->Arg(128);
