#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "minkproj/admm.hpp"
#include "minkproj/grid.hpp"
#include "minkproj/setspec.hpp"

namespace minkproj {

struct Evaluation {
    double value;
    Vector gradient;
};

/// Caller-supplied objective: m -> (f(m), grad f(m)).
using ObjectiveOracle = std::function<Evaluation(const ModelVector&)>;
/// Euclidean projection onto the feasible set.
using Projector = std::function<ModelVector(const ModelVector&)>;

struct SpgOptions {
    std::size_t max_iters = 15;
    std::size_t ls_memory = 5;           ///< nonmonotone reference window
    double alpha_min = 1e-8;
    double alpha_max = 1e8;
    double sufficient_decrease = 1e-4;
    double backtrack = 0.5;
    double min_step = 1e-10;             ///< line search gives up below this gamma
    double stationarity_tol = 1e-9;      ///< stop when ||p - m|| <= tol * max(||m||, 1)
    double feasibility_tol = 1e-4;
    bool keep_iterates = false;
};

enum class SpgStatus { max_iters, stationary, non_descent, line_search_failed };

std::string to_string(SpgStatus s);

struct SpgIteration {
    std::size_t iteration;
    double f;             ///< objective at the accepted iterate
    double step_norm;     ///< ||p - m|| for the projected trial p
    double gamma;         ///< accepted line-search fraction
    double alpha;         ///< spectral step used for p
    std::size_t evaluations;
    double feasibility;   ///< largest set distance of the iterate (NaN when unknown)
};

struct SpgResult {
    ModelVector m;
    SpgStatus status = SpgStatus::max_iters;
    double f0 = 0.0;
    std::vector<SpgIteration> history;
    std::vector<ModelVector> iterates;   ///< accepted iterates, when requested
    std::vector<std::string> warnings;
    std::size_t projections = 0;
};

void check_options(const SpgOptions& opts);

/// Spectral projected gradient with Barzilai-Borwein steps and a nonmonotone
/// Armijo line search along m + gamma (P(m - alpha grad) - m).
SpgResult spg_minimize(const ObjectiveOracle& oracle, const ModelVector& m0, const Projector& project,
                       const SpgOptions& opts = {});

/// Same, projecting onto a generalized Minkowski set with ADMM. Iterate
/// feasibility is tracked through the component decomposition.
SpgResult spg_minimize(const ObjectiveOracle& oracle, const ModelVector& m0, const GeneralizedMinkowskiSpec& spec,
                       const SpgOptions& opts = {}, const AdmmOptions& admm = {});

/// Worst relative error between central differences at steps {1e-4, 1e-5, 1e-6}
/// (best step per direction) and <grad f, d> over random unit directions d.
double gradient_check(const ObjectiveOracle& oracle, const ModelVector& m, std::size_t directions,
                      std::uint64_t seed = 0);

} // namespace minkproj
