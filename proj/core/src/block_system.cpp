#include "minkproj/block_system.hpp"

#include <algorithm>
#include <string>

#include "minkproj/error.hpp"

namespace minkproj {

BlockSystem::BlockSystem(const GeneralizedMinkowskiSpec& spec)
    : n_(spec.grid().size())
{
    require_valid(spec);
    for (const auto* d : spec.ordered()) {
        auto op = d->transform.materialize(spec.grid());
        auto gram = op.gram();
        rows_.push_back({d->target, std::move(op), std::move(gram), d->transform.is_identity(), d->label, d->set});
    }
    auto eye = SparseMatrix::identity(n_);
    rows_.push_back({Target::sum, eye, eye, true, "data", std::nullopt});
}

void BlockSystem::apply_row(std::size_t i, std::span<const double> x, std::span<const double> sum,
                            std::span<double> out) const
{
    const auto& r = rows_[i];
    std::span<const double> src = r.placement == Target::component_u   ? x.first(n_)
                                  : r.placement == Target::component_v ? x.subspan(n_, n_)
                                                                       : sum;
    if (r.identity) {
        std::copy(src.begin(), src.end(), out.begin());
    } else {
        r.op.matvec(src, out);
    }
}

void BlockSystem::apply_row_transpose_add(std::size_t i, std::span<const double> y, double alpha,
                                          std::span<double> x_out) const
{
    const auto& r = rows_[i];
    auto add_to = [&](std::span<double> dst) {
        if (r.identity) {
            for (std::size_t k = 0; k < n_; ++k) {
                dst[k] += alpha * y[k];
            }
        } else {
            r.op.rmatvec_add(y, alpha, dst);
        }
    };
    if (r.placement != Target::component_v) {
        add_to(x_out.first(n_));
    }
    if (r.placement != Target::component_u) {
        add_to(x_out.subspan(n_, n_));
    }
}

Vector BlockSystem::apply(std::span<const double> x) const
{
    if (x.size() != 2 * n_) {
        throw ShapeError("stacked vector must have length 2N");
    }
    Vector sum(n_);
    for (std::size_t k = 0; k < n_; ++k) {
        sum[k] = x[k] + x[n_ + k];
    }
    Vector out;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        Vector part(row_size(i));
        apply_row(i, x, sum, part);
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

BlockSystem assemble_block_system(const GeneralizedMinkowskiSpec& spec)
{
    return BlockSystem(spec);
}

namespace {

// (row block, col block) pairs touched by a Gram block with this placement.
std::vector<std::pair<std::size_t, std::size_t>> blocks_for(Target t)
{
    switch (t) {
    case Target::component_u:
        return {{0, 0}};
    case Target::component_v:
        return {{1, 1}};
    case Target::sum:
        return {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
    }
    return {};
}

std::size_t find_slot(const SparseMatrix& m, std::size_t r, std::size_t c)
{
    const auto begin = m.col_idx().begin() + static_cast<std::ptrdiff_t>(m.row_ptr()[r]);
    const auto end = m.col_idx().begin() + static_cast<std::ptrdiff_t>(m.row_ptr()[r + 1]);
    const auto it = std::lower_bound(begin, end, c);
    return static_cast<std::size_t>(it - m.col_idx().begin());
}

} // namespace

GramAssembler::GramAssembler(const BlockSystem& blocks, std::size_t diagonal_bandwidth_limit)
{
    const auto n = blocks.model_size();
    std::vector<Triplet> t;
    for (const auto& row : blocks.rows()) {
        const auto& g = row.gram;
        for (auto [rb, cb] : blocks_for(row.placement)) {
            for (std::size_t r = 0; r < n; ++r) {
                for (std::size_t k = g.row_ptr()[r]; k < g.row_ptr()[r + 1]; ++k) {
                    t.push_back({rb * n + r, cb * n + g.col_idx()[k], 1.0});
                }
            }
        }
    }
    pattern_ = SparseMatrix::from_triplets(2 * n, 2 * n, std::move(t));

    for (const auto& row : blocks.rows()) {
        const auto& g = row.gram;
        std::vector<std::size_t> slots;
        for (auto [rb, cb] : blocks_for(row.placement)) {
            for (std::size_t r = 0; r < n; ++r) {
                for (std::size_t k = g.row_ptr()[r]; k < g.row_ptr()[r + 1]; ++k) {
                    slots.push_back(find_slot(pattern_, rb * n + r, cb * n + g.col_idx()[k]));
                }
            }
        }
        slots_.push_back(std::move(slots));
        gram_values_.push_back(g.values());
        labels_.push_back(row.label);
    }
    use_diagonal_view_ = diagonal_bandwidth_limit > 0 && pattern_.block_bandwidth(n) <= diagonal_bandwidth_limit;
}

void GramAssembler::update(SparseMatrix& q, std::span<const double> rho) const
{
    if (rho.size() != slots_.size()) {
        throw SpecError({"expected " + std::to_string(slots_.size()) + " penalty parameters, got "
                         + std::to_string(rho.size())});
    }
    for (std::size_t i = 0; i < rho.size(); ++i) {
        if (!(rho[i] > 0.0)) {
            throw SpecError({"penalty parameter for row " + std::to_string(i) + " ("
                             + labels_[i] + ") must be > 0"});
        }
    }
    auto values = q.mutable_values();
    std::fill(values.begin(), values.end(), 0.0);
    for (std::size_t i = 0; i < slots_.size(); ++i) {
        const auto& gv = gram_values_[i];
        const auto& slots = slots_[i];
        const auto m = gv.size();
        for (std::size_t k = 0; k < slots.size(); ++k) {
            values[slots[k]] += rho[i] * gv[k % m];
        }
    }
    if (use_diagonal_view_) {
        q.build_diagonal_view();
    }
}

SparseMatrix GramAssembler::assemble(std::span<const double> rho) const
{
    SparseMatrix q = pattern_;
    update(q, rho);
    return q;
}

SparseMatrix assemble_Q(const BlockSystem& blocks, std::span<const double> rho)
{
    return GramAssembler(blocks).assemble(rho);
}

std::size_t banded_limit(const ModelGrid& grid)
{
    return 2 * grid.stride(grid.ndims() - 1) + 1;
}

} // namespace minkproj
