#include "minkproj/sparse.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "minkproj/error.hpp"
#include "minkproj/parallel.hpp"

namespace minkproj {

namespace {

void check_size(std::size_t got, std::size_t want, const char* what)
{
    if (got != want) {
        throw ShapeError(std::string(what) + ": expected length " + std::to_string(want)
                         + ", got " + std::to_string(got));
    }
}

} // namespace

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows)
    , cols_(cols)
    , row_ptr_(rows + 1, 0)
{
}

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets)
{
    for (const auto& t : triplets) {
        if (t.row >= rows || t.col >= cols) {
            throw ShapeError("triplet (" + std::to_string(t.row) + ", " + std::to_string(t.col)
                             + ") outside " + std::to_string(rows) + " x " + std::to_string(cols));
        }
    }
    std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    SparseMatrix m(rows, cols);
    m.col_idx_.reserve(triplets.size());
    m.values_.reserve(triplets.size());
    std::size_t k = 0;
    for (std::size_t r = 0; r < rows; ++r) {
        while (k < triplets.size() && triplets[k].row == r) {
            const auto c = triplets[k].col;
            double sum = 0.0;
            while (k < triplets.size() && triplets[k].row == r && triplets[k].col == c) {
                sum += triplets[k].value;
                ++k;
            }
            if (sum != 0.0) {
                m.col_idx_.push_back(c);
                m.values_.push_back(sum);
            }
        }
        m.row_ptr_[r + 1] = m.values_.size();
    }
    return m;
}

SparseMatrix SparseMatrix::identity(std::size_t n)
{
    Vector ones(n, 1.0);
    return diagonal(ones);
}

SparseMatrix SparseMatrix::diagonal(std::span<const double> d)
{
    std::vector<Triplet> t;
    t.reserve(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        t.push_back({i, i, d[i]});
    }
    return from_triplets(d.size(), d.size(), std::move(t));
}

std::span<double> SparseMatrix::mutable_values() noexcept
{
    diag_.reset();
    return values_;
}

bool SparseMatrix::is_identity() const
{
    if (rows_ != cols_ || nnz() != rows_) {
        return false;
    }
    for (std::size_t r = 0; r < rows_; ++r) {
        if (row_ptr_[r + 1] - row_ptr_[r] != 1 || col_idx_[row_ptr_[r]] != r || values_[row_ptr_[r]] != 1.0) {
            return false;
        }
    }
    return true;
}

void SparseMatrix::matvec_csr(std::span<const double> x, std::span<double> y, std::size_t threads) const
{
    check_size(x.size(), cols_, "matvec input");
    check_size(y.size(), rows_, "matvec output");
    parallel_blocks(rows_, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            double acc = 0.0;
            for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
                acc += values_[k] * x[col_idx_[k]];
            }
            y[r] = acc;
        }
    });
}

void SparseMatrix::matvec(std::span<const double> x, std::span<double> y, std::size_t threads) const
{
    if (!diag_) {
        matvec_csr(x, y, threads);
        return;
    }
    check_size(x.size(), cols_, "matvec input");
    check_size(y.size(), rows_, "matvec output");
    const auto& dv = *diag_;
    const auto n = static_cast<std::ptrdiff_t>(cols_);
    parallel_blocks(rows_, threads, [&](std::size_t begin, std::size_t end) {
        std::fill(y.begin() + static_cast<std::ptrdiff_t>(begin), y.begin() + static_cast<std::ptrdiff_t>(end), 0.0);
        for (std::size_t k = 0; k < dv.offsets.size(); ++k) {
            const auto off = dv.offsets[k];
            const auto& d = dv.diagonals[k];
            const auto lo = std::max<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(begin), -off);
            const auto hi = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(end), n - off);
            for (std::ptrdiff_t i = lo; i < hi; ++i) {
                y[static_cast<std::size_t>(i)] += d[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i + off)];
            }
        }
    });
}

Vector SparseMatrix::matvec(std::span<const double> x, std::size_t threads) const
{
    Vector y(rows_);
    matvec(x, y, threads);
    return y;
}

void SparseMatrix::rmatvec_add(std::span<const double> y, double alpha, std::span<double> x) const
{
    check_size(y.size(), rows_, "rmatvec input");
    check_size(x.size(), cols_, "rmatvec output");
    for (std::size_t r = 0; r < rows_; ++r) {
        const double yr = alpha * y[r];
        if (yr == 0.0) {
            continue;
        }
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
            x[col_idx_[k]] += values_[k] * yr;
        }
    }
}

void SparseMatrix::rmatvec(std::span<const double> y, std::span<double> x) const
{
    check_size(x.size(), cols_, "rmatvec output");
    std::fill(x.begin(), x.end(), 0.0);
    rmatvec_add(y, 1.0, x);
}

Vector SparseMatrix::rmatvec(std::span<const double> y) const
{
    Vector x(cols_, 0.0);
    rmatvec(y, x);
    return x;
}

SparseMatrix SparseMatrix::transpose() const
{
    SparseMatrix t(cols_, rows_);
    for (auto c : col_idx_) {
        ++t.row_ptr_[c + 1];
    }
    for (std::size_t r = 0; r < cols_; ++r) {
        t.row_ptr_[r + 1] += t.row_ptr_[r];
    }
    t.col_idx_.resize(nnz());
    t.values_.resize(nnz());
    std::vector<std::size_t> next(t.row_ptr_.begin(), t.row_ptr_.end() - 1);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
            const auto dst = next[col_idx_[k]]++;
            t.col_idx_[dst] = r;
            t.values_[dst] = values_[k];
        }
    }
    return t;
}

SparseMatrix SparseMatrix::gram() const
{
    const SparseMatrix at = transpose();
    SparseMatrix g(cols_, cols_);
    Vector acc(cols_, 0.0);
    std::vector<char> used(cols_, 0);
    std::vector<std::size_t> pattern;
    for (std::size_t i = 0; i < cols_; ++i) {
        pattern.clear();
        // Row i of A^T A = sum over rows r of A containing column i.
        for (std::size_t ka = at.row_ptr_[i]; ka < at.row_ptr_[i + 1]; ++ka) {
            const auto r = at.col_idx_[ka];
            const double a = at.values_[ka];
            for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
                const auto j = col_idx_[k];
                if (!used[j]) {
                    used[j] = 1;
                    pattern.push_back(j);
                }
                acc[j] += a * values_[k];
            }
        }
        std::sort(pattern.begin(), pattern.end());
        for (auto j : pattern) {
            if (acc[j] != 0.0) {
                g.col_idx_.push_back(j);
                g.values_.push_back(acc[j]);
            }
            acc[j] = 0.0;
            used[j] = 0;
        }
        g.row_ptr_[i + 1] = g.values_.size();
    }
    return g;
}

std::size_t SparseMatrix::bandwidth() const
{
    std::size_t bw = 0;
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
            const auto c = col_idx_[k];
            bw = std::max(bw, c > r ? c - r : r - c);
        }
    }
    return bw;
}

std::size_t SparseMatrix::block_bandwidth(std::size_t block) const
{
    if (block == 0) {
        return bandwidth();
    }
    std::size_t bw = 0;
    for (std::size_t r = 0; r < rows_; ++r) {
        const auto rr = r % block;
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
            const auto cc = col_idx_[k] % block;
            bw = std::max(bw, cc > rr ? cc - rr : rr - cc);
        }
    }
    return bw;
}

void SparseMatrix::build_diagonal_view()
{
    std::map<std::ptrdiff_t, std::size_t> slot;
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
            slot.emplace(static_cast<std::ptrdiff_t>(col_idx_[k]) - static_cast<std::ptrdiff_t>(r), 0);
        }
    }
    DiagonalStorage dv;
    for (auto& [off, idx] : slot) {
        idx = dv.offsets.size();
        dv.offsets.push_back(off);
        dv.diagonals.emplace_back(rows_, 0.0);
    }
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
            const auto off = static_cast<std::ptrdiff_t>(col_idx_[k]) - static_cast<std::ptrdiff_t>(r);
            dv.diagonals[slot[off]][r] = values_[k];
        }
    }
    diag_ = std::move(dv);
}

Eigen::MatrixXd SparseMatrix::to_dense() const
{
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_));
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
            d(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col_idx_[k])) = values_[k];
        }
    }
    return d;
}

} // namespace minkproj
