#include <benchmark/benchmark.h>

#include "minkproj/admm.hpp"
#include "minkproj/synthetic.hpp"

using namespace minkproj;

static void BM_admm_blocky(benchmark::State& state)
{
    BlockyParams bp;
    bp.nz = bp.nx = static_cast<std::size_t>(state.range(0));
    const auto sample = blocky_anomaly_2d(bp, 1);
    const auto& g = sample.model.grid();
    GeneralizedMinkowskiSpec s(g);
    s.add({Target::sum, LinearOperatorSpec::identity(), ElementarySet::box(2350.0, 2550.0), "sum bounds"});
    s.add({Target::sum, LinearOperatorSpec::gradient(), ElementarySet::l1_ball(2000.0), "sum tv"});
    s.add({Target::component_u, LinearOperatorSpec::identity(), ElementarySet::box(-150.0, 0.0), "anomaly bounds"});
    s.add({Target::component_v, LinearOperatorSpec::identity(), ElementarySet::fixed(2500.0), "background"});
    AdmmOptions o;
    o.threads = static_cast<std::size_t>(state.range(1));
    const AdmmProjector proj(s, o);
    std::size_t iters = 0;
    for (auto _ : state) {
        const auto p = proj.project(sample.model);
        iters = p.report.iterations;
        benchmark::DoNotOptimize(p.w.values().data());
    }
    state.counters["admm_iterations"] = static_cast<double>(iters);
}
BENCHMARK(BM_admm_blocky)->Args({20, 1})->Args({50, 1})->Args({50, 4})->Unit(benchmark::kMillisecond);
