#include "minkproj/spg.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>

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

double norm2(std::span<const double> a)
{
    return std::sqrt(dot(a, a));
}

double norm_inf(std::span<const double> a)
{
    double m = 0.0;
    for (double v : a) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

Vector combine(std::span<const double> a, std::span<const double> b, double t)
{
    // (1 - t) a + t b
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = a[i] + t * (b[i] - a[i]);
    }
    return out;
}

struct Projected {
    ModelVector w;
    std::optional<std::pair<ModelVector, ModelVector>> parts;
};

using ProjectFn = std::function<Projected(const ModelVector&)>;
using FeasibilityFn = std::function<double(const ModelVector&, const ModelVector&)>;

Evaluation evaluate(const ObjectiveOracle& oracle, const ModelVector& m)
{
    auto e = oracle(m);
    if (e.gradient.size() != m.size()) {
        throw ShapeError("objective gradient length does not match the model");
    }
    if (!std::isfinite(e.value)) {
        throw SolverError("objective returned a non-finite value");
    }
    return e;
}

SpgResult run_spg(const ObjectiveOracle& oracle, const ModelVector& m0, const ProjectFn& project,
                  const FeasibilityFn& feasibility, const SpgOptions& opts)
{
    check_options(opts);
    const auto& grid = m0.grid();
    SpgResult out;

    auto first = project(m0);
    ++out.projections;
    ModelVector m = first.w;
    auto parts = first.parts;
    Evaluation cur = evaluate(oracle, m);
    out.f0 = cur.value;
    std::deque<double> recent{cur.value};

    const double ginf = norm_inf(cur.gradient);
    if (ginf == 0.0) {
        out.m = m;
        out.status = SpgStatus::stationary;
        return out;
    }
    double alpha = std::clamp(1.0 / ginf, opts.alpha_min, opts.alpha_max);

    for (std::size_t it = 1; it <= opts.max_iters; ++it) {
        Vector shifted(m.size());
        for (std::size_t i = 0; i < m.size(); ++i) {
            shifted[i] = m[i] - alpha * cur.gradient[i];
        }
        auto proj = project(ModelVector(grid, std::move(shifted)));
        ++out.projections;
        Vector d(m.size());
        for (std::size_t i = 0; i < m.size(); ++i) {
            d[i] = proj.w[i] - m[i];
        }
        const double step_norm = norm2(d);
        if (step_norm <= opts.stationarity_tol * std::max(norm2(m.span()), 1.0)) {
            out.status = SpgStatus::stationary;
            break;
        }
        const double slope = dot(cur.gradient, d);
        if (slope >= 0.0) {
            out.status = SpgStatus::non_descent;
            out.warnings.push_back("projected direction is not a descent direction at iteration "
                                   + std::to_string(it) + " (<grad, p - m> = " + std::to_string(slope)
                                   + "); the projection is likely inexact");
            break;
        }

        const double f_ref = *std::max_element(recent.begin(), recent.end());
        double gamma = 1.0;
        std::size_t evals = 0;
        std::optional<ModelVector> accepted;
        Evaluation trial_eval;
        while (gamma >= opts.min_step) {
            ModelVector trial(grid, combine(m.span(), proj.w.span(), gamma));
            trial_eval = evaluate(oracle, trial);
            ++evals;
            if (trial_eval.value <= f_ref + opts.sufficient_decrease * gamma * slope) {
                accepted = std::move(trial);
                break;
            }
            gamma *= opts.backtrack;
        }
        if (!accepted) {
            out.status = SpgStatus::line_search_failed;
            out.warnings.push_back("line search failed at iteration " + std::to_string(it));
            break;
        }

        Vector s(m.size()), yk(m.size());
        for (std::size_t i = 0; i < m.size(); ++i) {
            s[i] = (*accepted)[i] - m[i];
            yk[i] = trial_eval.gradient[i] - cur.gradient[i];
        }
        const double used_alpha = alpha;
        const double sty = dot(s, yk);
        alpha = sty > 0.0 ? std::clamp(dot(s, s) / sty, opts.alpha_min, opts.alpha_max) : opts.alpha_max;

        if (parts && proj.parts) {
            parts = std::make_pair(ModelVector(grid, combine(parts->first.span(), proj.parts->first.span(), gamma)),
                                   ModelVector(grid, combine(parts->second.span(), proj.parts->second.span(), gamma)));
        } else {
            parts.reset();
        }
        m = std::move(*accepted);
        cur = std::move(trial_eval);
        recent.push_back(cur.value);
        while (recent.size() > opts.ls_memory) {
            recent.pop_front();
        }
        const double feas = parts && feasibility ? feasibility(parts->first, parts->second)
                                                 : std::numeric_limits<double>::quiet_NaN();
        out.history.push_back({it, cur.value, step_norm, gamma, used_alpha, evals, feas});
        if (opts.keep_iterates) {
            out.iterates.push_back(m);
        }
    }
    out.m = std::move(m);
    return out;
}

} // namespace

std::string to_string(SpgStatus s)
{
    switch (s) {
    case SpgStatus::max_iters:
        return "max_iters";
    case SpgStatus::stationary:
        return "stationary";
    case SpgStatus::non_descent:
        return "non_descent";
    case SpgStatus::line_search_failed:
        return "line_search_failed";
    }
    return "?";
}

void check_options(const SpgOptions& o)
{
    std::vector<std::string> issues;
    if (!(o.alpha_min > 0.0 && o.alpha_min < o.alpha_max)) {
        issues.push_back("SPG needs 0 < alpha_min < alpha_max");
    }
    if (!(o.sufficient_decrease > 0.0 && o.sufficient_decrease < 1.0)) {
        issues.push_back("SPG sufficient-decrease constant must lie in (0, 1)");
    }
    if (!(o.backtrack > 0.0 && o.backtrack < 1.0)) {
        issues.push_back("SPG backtrack factor must lie in (0, 1)");
    }
    if (o.ls_memory < 1) {
        issues.push_back("SPG line-search memory must be >= 1");
    }
    if (!issues.empty()) {
        throw SpecError(std::move(issues));
    }
}

SpgResult spg_minimize(const ObjectiveOracle& oracle, const ModelVector& m0, const Projector& project,
                       const SpgOptions& opts)
{
    return run_spg(
        oracle, m0, [&](const ModelVector& x) { return Projected{project(x), std::nullopt}; }, nullptr, opts);
}

SpgResult spg_minimize(const ObjectiveOracle& oracle, const ModelVector& m0, const GeneralizedMinkowskiSpec& spec,
                       const SpgOptions& opts, const AdmmOptions& admm)
{
    const AdmmProjector projector(spec, admm);
    std::vector<std::string> warnings;
    auto project = [&](const ModelVector& x) {
        auto p = projector.project(x);
        if (!p.report.converged) {
            warnings.push_back("projection stopped after " + std::to_string(p.report.iterations)
                               + " ADMM iterations without meeting tolerances");
        }
        return Projected{std::move(p.w), std::make_pair(std::move(p.u), std::move(p.v))};
    };
    auto feasibility = [&](const ModelVector& u, const ModelVector& v) {
        double worst = 0.0;
        for (const auto& d : is_member(spec, u, v, opts.feasibility_tol).distances) {
            worst = std::max(worst, d.distance);
        }
        return worst;
    };
    auto result = run_spg(oracle, m0, project, feasibility, opts);
    result.warnings.insert(result.warnings.end(), warnings.begin(), warnings.end());
    return result;
}

double gradient_check(const ObjectiveOracle& oracle, const ModelVector& m, std::size_t directions, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    const auto g = evaluate(oracle, m).gradient;
    double worst = 0.0;
    for (std::size_t k = 0; k < directions; ++k) {
        Vector d(m.size());
        for (auto& v : d) {
            v = normal(rng);
        }
        const double dn = norm2(d);
        for (auto& v : d) {
            v /= dn;
        }
        const double claimed = dot(g, d);
        double best = std::numeric_limits<double>::infinity();
        for (double h : {1e-4, 1e-5, 1e-6}) {
            Vector plus(m.size()), minus(m.size());
            for (std::size_t i = 0; i < m.size(); ++i) {
                plus[i] = m[i] + h * d[i];
                minus[i] = m[i] - h * d[i];
            }
            const double fd = (oracle(ModelVector(m.grid(), std::move(plus))).value
                               - oracle(ModelVector(m.grid(), std::move(minus))).value)
                              / (2.0 * h);
            const double denom = std::max({std::abs(claimed), std::abs(fd), 1e-12});
            best = std::min(best, std::abs(fd - claimed) / denom);
        }
        worst = std::max(worst, best);
    }
    return worst;
}

} // namespace minkproj
