#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "minkproj/grid.hpp"

namespace minkproj {

struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
};

/// Compressed diagonal storage: diagonal k holds A[i, i + offsets[k]] at
/// position i (entries that fall outside the matrix are stored as zero).
struct DiagonalStorage {
    std::vector<std::ptrdiff_t> offsets;
    std::vector<Vector> diagonals;
};

/// Compressed sparse row matrix.
///
/// Invariants: column indices strictly increase within a row and no explicit
/// zeros are stored. An optional compressed-diagonal copy may be attached for
/// banded matrices; matvec then uses it.
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(std::size_t rows, std::size_t cols);

    /// Duplicates are summed; resulting zeros are dropped.
    static SparseMatrix from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets);
    static SparseMatrix identity(std::size_t n);
    static SparseMatrix diagonal(std::span<const double> d);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t nnz() const noexcept { return values_.size(); }

    const std::vector<std::size_t>& row_ptr() const noexcept { return row_ptr_; }
    const std::vector<std::size_t>& col_idx() const noexcept { return col_idx_; }
    const std::vector<double>& values() const noexcept { return values_; }
    /// Mutable values with a fixed sparsity pattern. Drops the diagonal view.
    std::span<double> mutable_values() noexcept;

    bool is_identity() const;

    /// y = A x.
    void matvec(std::span<const double> x, std::span<double> y, std::size_t threads = 1) const;
    Vector matvec(std::span<const double> x, std::size_t threads = 1) const;
    /// x = A^T y.
    void rmatvec(std::span<const double> y, std::span<double> x) const;
    Vector rmatvec(std::span<const double> y) const;
    /// x += alpha * A^T y.
    void rmatvec_add(std::span<const double> y, double alpha, std::span<double> x) const;

    SparseMatrix transpose() const;
    /// A^T A, exact zeros dropped.
    SparseMatrix gram() const;

    /// Largest |i - j| over stored entries.
    std::size_t bandwidth() const;
    /// Largest |i - j| over stored entries, with indices taken modulo `block`.
    std::size_t block_bandwidth(std::size_t block) const;

    /// Builds the compressed-diagonal copy from the current values.
    void build_diagonal_view();
    bool has_diagonal_view() const noexcept { return diag_.has_value(); }
    const std::optional<DiagonalStorage>& diagonal_view() const noexcept { return diag_; }
    /// Matvec forced through CSR, regardless of an attached diagonal view.
    void matvec_csr(std::span<const double> x, std::span<double> y, std::size_t threads = 1) const;

    Eigen::MatrixXd to_dense() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<std::size_t> col_idx_;
    std::vector<double> values_;
    std::optional<DiagonalStorage> diag_;
};

} // namespace minkproj
