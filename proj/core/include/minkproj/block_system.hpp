#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "minkproj/setspec.hpp"
#include "minkproj/sparse.hpp"

namespace minkproj {

/// One block row of the stacked operator acting on x = (u; v):
/// (A 0) for component_u, (0 A) for component_v, (A A) for sum.
struct BlockRow {
    Target placement;
    SparseMatrix op;
    SparseMatrix gram; // op^T op
    bool identity;
    std::string label;
    std::optional<ElementarySet> set; // empty for the final (I, I) data row
};

/// Block rows in D, E, F order followed by the (I_N, I_N) row.
class BlockSystem {
public:
    explicit BlockSystem(const GeneralizedMinkowskiSpec& spec);

    std::size_t model_size() const noexcept { return n_; }
    std::size_t s() const noexcept { return rows_.size(); }
    const std::vector<BlockRow>& rows() const noexcept { return rows_; }
    const BlockRow& row(std::size_t i) const { return rows_[i]; }
    std::size_t row_size(std::size_t i) const { return rows_[i].op.rows(); }

    /// out = A_i x, where `sum` holds u + v for x.
    void apply_row(std::size_t i, std::span<const double> x, std::span<const double> sum, std::span<double> out) const;
    /// x_out += alpha * A_i^T y (x_out has length 2N).
    void apply_row_transpose_add(std::size_t i, std::span<const double> y, double alpha, std::span<double> x_out) const;

    /// Stacked A~ x, rows concatenated.
    Vector apply(std::span<const double> x) const;

private:
    std::size_t n_ = 0;
    std::vector<BlockRow> rows_;
};

BlockSystem assemble_block_system(const GeneralizedMinkowskiSpec& spec);

/// Assembles Q = sum_i rho_i A_i^T A_i (2N x 2N) from precomputed Gram blocks.
///
/// The sparsity pattern is fixed at construction; a change of rho rescales
/// and re-accumulates the stored Gram values into it. Entries are combined
/// in block-row order so reassembly is deterministic.
class GramAssembler {
public:
    /// `diagonal_bandwidth_limit`: build a compressed-diagonal view when every
    /// N x N block of Q has bandwidth <= the limit (0 disables the view).
    GramAssembler(const BlockSystem& blocks, std::size_t diagonal_bandwidth_limit = 0);

    /// Throws SpecError if any rho <= 0 or the count differs from s.
    SparseMatrix assemble(std::span<const double> rho) const;
    void update(SparseMatrix& q, std::span<const double> rho) const;

private:
    SparseMatrix pattern_;
    std::vector<Vector> gram_values_;
    std::vector<std::string> labels_;
    std::vector<std::vector<std::size_t>> slots_; // per row: Q value index per gram entry and block
    bool use_diagonal_view_ = false;
};

SparseMatrix assemble_Q(const BlockSystem& blocks, std::span<const double> rho);

/// The bandwidth limit used by the solver: 2 * (largest axis stride) + 1.
std::size_t banded_limit(const ModelGrid& grid);

} // namespace minkproj
