#include "minkproj/admm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "minkproj/error.hpp"
#include "minkproj/parallel.hpp"

namespace minkproj {

namespace {

double norm2(std::span<const double> x)
{
    double s = 0.0;
    for (double v : x) {
        s += v * v;
    }
    return std::sqrt(s);
}

} // namespace

void check_options(const AdmmOptions& o)
{
    std::vector<std::string> issues;
    if (!(o.eps_primal > 0.0) || !(o.eps_dual > 0.0) || !(o.cg_tol > 0.0)) {
        issues.push_back("solver tolerances must be positive");
    }
    if (!(o.gamma > 0.0 && o.gamma <= 2.0)) {
        issues.push_back("relaxation gamma must lie in (0, 2]");
    }
    if (!(o.rho_init > 0.0)) {
        issues.push_back("rho_init must be positive");
    }
    if (o.adapt && (o.adapt_every == 0 || !(o.adapt_factor_cap >= 1.0) || !(o.adapt_step > 1.0)
                    || !(o.adapt_imbalance > 1.0))) {
        issues.push_back("adaptation needs adapt_every >= 1, cap >= 1, step > 1, imbalance > 1");
    }
    if (!(o.nonconvex_rho_growth >= 1.0) || (o.nonconvex_rho_growth != 1.0 && o.adapt_every == 0)) {
        issues.push_back("nonconvex_rho_growth must be >= 1 and needs adapt_every >= 1");
    }
    if (o.max_iters == 0) {
        issues.push_back("max_iters must be >= 1");
    }
    if (!issues.empty()) {
        throw SpecError(std::move(issues));
    }
}

AdmmProjector::AdmmProjector(const GeneralizedMinkowskiSpec& spec, AdmmOptions opts)
    : spec_(spec)
    , opts_(opts)
{
    check_options(opts_);
    blocks_ = std::make_unique<BlockSystem>(spec_);
    assembler_ = std::make_unique<GramAssembler>(*blocks_, opts_.banded_view ? banded_limit(spec_.grid()) : 0);
}

AdmmState AdmmProjector::initial_state(const ModelVector& m) const
{
    if (!(m.grid() == spec_.grid())) {
        throw ShapeError("model grid " + m.grid().describe() + " does not match spec grid " + spec_.grid().describe());
    }
    const auto n = spec_.grid().size();
    const auto s = blocks_->s();
    AdmmState st;
    st.x.assign(2 * n, 0.0);
    std::copy(m.values().begin(), m.values().end(), st.x.begin());
    st.sum = m.values();
    st.y.resize(s);
    st.dual.resize(s);
    for (std::size_t i = 0; i < s; ++i) {
        st.y[i].resize(blocks_->row_size(i));
        blocks_->apply_row(i, st.x, st.sum, st.y[i]);
        st.dual[i].assign(blocks_->row_size(i), 0.0);
    }
    st.rho.assign(s, opts_.rho_init);
    st.gamma.assign(s, opts_.gamma);
    st.q = assembler_->assemble(st.rho);
    st.rhs.assign(2 * n, 0.0);
    st.primal_abs.assign(s, 0.0);
    st.primal_rel.assign(s, 0.0);
    st.dual_row.assign(s, 0.0);
    return st;
}

CgResult AdmmProjector::x_update(AdmmState& st) const
{
    const auto s = blocks_->s();
    const auto n2 = st.x.size();
    // Row contributions are formed independently, then reduced in row order.
    std::vector<Vector> parts(s, Vector(n2, 0.0));
    parallel_for(s, opts_.threads, [&](std::size_t i) {
        Vector weighted(st.y[i].size());
        for (std::size_t k = 0; k < weighted.size(); ++k) {
            weighted[k] = st.rho[i] * st.y[i][k] + st.dual[i][k];
        }
        blocks_->apply_row_transpose_add(i, weighted, 1.0, parts[i]);
    });
    std::fill(st.rhs.begin(), st.rhs.end(), 0.0);
    for (const auto& part : parts) {
        for (std::size_t k = 0; k < n2; ++k) {
            st.rhs[k] += part[k];
        }
    }
    CgOptions cg;
    cg.tol = opts_.cg_tol;
    cg.max_iters = opts_.cg_max_iters;
    cg.threads = opts_.threads;
    auto res = conjugate_gradient(st.q, st.rhs, st.x, cg);
    const auto n = n2 / 2;
    for (std::size_t k = 0; k < n; ++k) {
        st.sum[k] = st.x[k] + st.x[n + k];
    }
    return res;
}

void AdmmProjector::y_v_update(AdmmState& st, const ModelVector& m) const
{
    const auto s = blocks_->s();
    const auto n2 = st.x.size();
    std::vector<Vector> change(s, Vector(n2, 0.0));
    std::vector<Vector> multiplier(s, Vector(n2, 0.0));
    parallel_for(s, opts_.threads, [&](std::size_t i) {
        const auto len = st.y[i].size();
        const double rho = st.rho[i];
        const double gamma = st.gamma[i];
        Vector ax(len), relaxed(len), arg(len), y_new(len), dy(len);
        blocks_->apply_row(i, st.x, st.sum, ax);
        for (std::size_t k = 0; k < len; ++k) {
            relaxed[k] = gamma * ax[k] + (1.0 - gamma) * st.y[i][k];
            arg[k] = relaxed[k] - st.dual[i][k] / rho;
        }
        const auto& row = blocks_->row(i);
        if (row.set) {
            row.set->project(arg, y_new);
        } else {
            // prox of 1/2 ||y - m||^2 with weight rho.
            const auto& mv = m.values();
            for (std::size_t k = 0; k < len; ++k) {
                y_new[k] = (mv[k] + rho * arg[k]) / (1.0 + rho);
            }
        }
        double p2 = 0.0, yn2 = 0.0, ax2 = 0.0;
        for (std::size_t k = 0; k < len; ++k) {
            st.dual[i][k] += rho * (y_new[k] - relaxed[k]);
            dy[k] = y_new[k] - st.y[i][k];
            const double r = y_new[k] - ax[k];
            p2 += r * r;
            yn2 += y_new[k] * y_new[k];
            ax2 += ax[k] * ax[k];
        }
        st.y[i] = std::move(y_new);
        st.primal_abs[i] = std::sqrt(p2);
        st.primal_rel[i] = st.primal_abs[i] / std::max({std::sqrt(yn2), std::sqrt(ax2), 1.0});
        blocks_->apply_row_transpose_add(i, dy, rho, change[i]);
        blocks_->apply_row_transpose_add(i, st.dual[i], 1.0, multiplier[i]);
        st.dual_row[i] = norm2(change[i]);
    });
    Vector total(n2, 0.0);
    double mult2 = 0.0;
    for (std::size_t i = 0; i < s; ++i) {
        for (std::size_t k = 0; k < n2; ++k) {
            total[k] += change[i][k];
            mult2 += multiplier[i][k] * multiplier[i][k];
        }
    }
    st.dual_rel = norm2(total) / std::max(std::sqrt(mult2), 1.0);
}

bool AdmmProjector::adapt_parameters(AdmmState& st) const
{
    const double lo = opts_.rho_init / opts_.adapt_factor_cap;
    const double hi = opts_.rho_init * opts_.adapt_factor_cap;
    bool changed = false;
    for (std::size_t i = 0; i < st.rho.size(); ++i) {
        const auto& set = blocks_->row(i).set;
        if (opts_.nonconvex_rho_growth != 1.0 && set && !set->is_convex()) {
            continue;   // driven by the continuation instead
        }
        const double primal = st.primal_abs[i];
        const double dual = st.dual_row[i];
        double next = st.rho[i];
        if (primal > opts_.adapt_imbalance * dual) {
            next = std::min(st.rho[i] * opts_.adapt_step, hi);
        } else if (dual > opts_.adapt_imbalance * primal) {
            next = std::max(st.rho[i] / opts_.adapt_step, lo);
        }
        if (next != st.rho[i]) {
            // Multipliers are unscaled, so they carry over unchanged.
            st.rho[i] = next;
            changed = true;
        }
    }
    if (changed) {
        assembler_->update(st.q, st.rho);
    }
    return changed;
}

bool AdmmProjector::grow_nonconvex(AdmmState& st) const
{
    bool changed = false;
    for (std::size_t i = 0; i < st.rho.size(); ++i) {
        const auto& set = blocks_->row(i).set;
        if (set && !set->is_convex() && st.primal_rel[i] > opts_.eps_primal) {
            st.rho[i] *= opts_.nonconvex_rho_growth;
            changed = true;
        }
    }
    if (changed) {
        assembler_->update(st.q, st.rho);
    }
    return changed;
}

Projection AdmmProjector::project(const ModelVector& m) const
{
    const auto start = std::chrono::steady_clock::now();
    AdmmState st = initial_state(m);
    SolveReport report;
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_iter = 0;

    for (std::size_t it = 1; it <= opts_.max_iters; ++it) {
        st.iteration = it;
        const auto cg = x_update(st);
        for (double v : st.x) {
            if (!std::isfinite(v)) {
                throw SolverError("ADMM iterates became non-finite at iteration " + std::to_string(it));
            }
        }
        y_v_update(st, m);
        report.total_cg_iterations += cg.iterations;
        report.iterations = it;
        report.max_primal = *std::max_element(st.primal_rel.begin(), st.primal_rel.end());
        report.dual = st.dual_rel;
        report.history.push_back({it, report.max_primal, report.dual, cg.iterations});

        if (report.max_primal <= opts_.eps_primal && report.dual <= opts_.eps_dual) {
            report.converged = true;
            break;
        }
        const double score = std::max(report.max_primal, report.dual);
        if (score < 0.999 * best) {
            best = score;
            best_iter = it;
        } else if (!report.stagnated && it - best_iter >= opts_.stagnation_window) {
            report.stagnated = true;
            report.warnings.push_back("possible empty intersection: residuals have not decreased for "
                                      + std::to_string(opts_.stagnation_window) + " iterations (since iteration "
                                      + std::to_string(best_iter) + ")");
        }
        if (opts_.adapt && it <= opts_.adapt_freeze_after && it % opts_.adapt_every == 0) {
            adapt_parameters(st);
        }
        if (opts_.nonconvex_rho_growth != 1.0 && it % opts_.adapt_every == 0) {
            grow_nonconvex(st);
        }
    }

    const auto& grid = spec_.grid();
    const auto n = grid.size();
    Vector u(st.x.begin(), st.x.begin() + static_cast<std::ptrdiff_t>(n));
    Vector v(st.x.begin() + static_cast<std::ptrdiff_t>(n), st.x.end());
    Vector w(n);
    for (std::size_t k = 0; k < n; ++k) {
        w[k] = u[k] + v[k];
    }
    for (std::size_t i = 0; i < blocks_->s(); ++i) {
        const auto& row = blocks_->row(i);
        report.rows.push_back({row.label, st.primal_rel[i], st.rho[i], st.gamma[i]});
        if (!row.set) {
            continue;
        }
        const std::span<const double> part = row.placement == Target::component_u   ? std::span<const double>(u)
                                             : row.placement == Target::component_v ? std::span<const double>(v)
                                                                                    : std::span<const double>(w);
        const double dist = feasibility_distance(part, *row.set, row.op);
        report.feasibility.push_back({row.label, row.placement, dist, dist > default_member_tol});
    }
    if (!report.converged) {
        report.warnings.push_back("reached max_iters = " + std::to_string(opts_.max_iters)
                                  + " before the residual tolerances were met");
    }
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {ModelVector(grid, std::move(w)), ModelVector(grid, std::move(u)), ModelVector(grid, std::move(v)),
            std::move(report)};
}

Projection admm_project(const ModelVector& m, const GeneralizedMinkowskiSpec& spec, const AdmmOptions& opts)
{
    return AdmmProjector(spec, opts).project(m);
}

Projection sample_element(const GeneralizedMinkowskiSpec& spec, const ModelVector& seed, const AdmmOptions& opts)
{
    return admm_project(seed, spec, opts);
}

} // namespace minkproj
