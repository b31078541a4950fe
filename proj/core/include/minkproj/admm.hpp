#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "minkproj/block_system.hpp"
#include "minkproj/cg.hpp"
#include "minkproj/grid.hpp"
#include "minkproj/setspec.hpp"

namespace minkproj {

struct AdmmOptions {
    std::size_t max_iters = 2000;
    double eps_primal = 1e-4;   ///< per-row relative primal residual
    double eps_dual = 1e-4;     ///< relative dual residual
    double cg_tol = 1e-8;
    std::size_t cg_max_iters = 0;  ///< 0: system dimension
    double rho_init = 1.0;
    double gamma = 1.0;         ///< relaxation, in (0, 2]

    // Residual balancing of the per-row penalties.
    bool adapt = true;
    std::size_t adapt_every = 10;
    double adapt_factor_cap = 10.0;     ///< rho stays in [rho_init / cap, rho_init * cap]
    double adapt_imbalance = 10.0;      ///< residual ratio that triggers a change
    double adapt_step = 2.0;
    std::size_t adapt_freeze_after = 500;

    /// Penalty continuation for rows with non-convex sets (cardinality, rank,
    /// annulus with a hole): every adapt_every iterations, each such row whose
    /// primal residual exceeds eps_primal has its rho multiplied by this
    /// factor, uncapped. 1 disables it.
    double nonconvex_rho_growth = 1.3;

    std::size_t stagnation_window = 100;
    std::size_t threads = 1;    ///< 0: hardware concurrency
    bool banded_view = true;    ///< compressed-diagonal Q when banded
};

/// Throws SpecError for out-of-range options.
void check_options(const AdmmOptions& opts);

struct IterationRecord {
    std::size_t iteration;
    double max_primal;
    double dual;
    std::size_t cg_iterations;
};

struct RowReport {
    std::string label;
    double primal;  ///< relative primal residual at exit
    double rho;
    double gamma;
};

struct SolveReport {
    bool converged = false;
    bool stagnated = false;   ///< no residual decrease over the stagnation window
    std::size_t iterations = 0;
    double max_primal = 0.0;
    double dual = 0.0;
    std::size_t total_cg_iterations = 0;
    std::vector<RowReport> rows;
    std::vector<SetDistance> feasibility;  ///< u vs D, v vs E, w vs F
    std::vector<IterationRecord> history;
    std::vector<std::string> warnings;
    double wall_seconds = 0.0;
};

struct Projection {
    ModelVector w;
    ModelVector u;
    ModelVector v;
    SolveReport report;
};

/// Iterates of the relaxed ADMM scheme. Row i of every per-row array refers
/// to block row i of the stacked operator.
struct AdmmState {
    Vector x;                    ///< (u; v)
    Vector sum;                  ///< u + v for the current x
    std::vector<Vector> y;       ///< split variables
    std::vector<Vector> dual;    ///< Lagrange multipliers
    std::vector<double> rho;
    std::vector<double> gamma;
    std::size_t iteration = 0;
    SparseMatrix q;
    Vector rhs;

    // Residuals from the most recent y/v update.
    std::vector<double> primal_abs;   ///< ||y_i - A_i x||
    std::vector<double> primal_rel;
    std::vector<double> dual_row;     ///< rho_i ||A_i^T (y_i new - y_i old)||
    double dual_rel = 0.0;
};

/// Projection onto a generalized Minkowski set.
///
/// Holds the assembled block operator and Gram pattern for one spec; each
/// call to project() owns a fresh state, so one instance can serve
/// sequential calls (SPG uses it that way).
class AdmmProjector {
public:
    explicit AdmmProjector(const GeneralizedMinkowskiSpec& spec, AdmmOptions opts = {});

    Projection project(const ModelVector& m) const;

    const GeneralizedMinkowskiSpec& spec() const noexcept { return spec_; }
    const AdmmOptions& options() const noexcept { return opts_; }
    const BlockSystem& blocks() const noexcept { return *blocks_; }

    /// u = m, v = 0, y_i = A_i x, multipliers zero, rho/gamma at their initial values.
    AdmmState initial_state(const ModelVector& m) const;
    /// Forms sum_i A_i^T (rho_i y_i + v_i) and solves Q x = rhs by CG from the current x.
    CgResult x_update(AdmmState& state) const;
    /// Relaxation, prox, and multiplier updates for every row; refreshes residuals.
    void y_v_update(AdmmState& state, const ModelVector& m) const;
    /// Residual balancing; returns true if any rho changed (Q is then reassembled).
    bool adapt_parameters(AdmmState& state) const;
    /// Penalty continuation on rows with non-convex sets; true if any rho changed.
    bool grow_nonconvex(AdmmState& state) const;

private:
    GeneralizedMinkowskiSpec spec_;
    AdmmOptions opts_;
    std::unique_ptr<BlockSystem> blocks_;
    std::unique_ptr<GramAssembler> assembler_;
};

Projection admm_project(const ModelVector& m, const GeneralizedMinkowskiSpec& spec, const AdmmOptions& opts = {});

/// Draws an element of the set by projecting `seed` onto it.
Projection sample_element(const GeneralizedMinkowskiSpec& spec, const ModelVector& seed, const AdmmOptions& opts = {});

} // namespace minkproj
