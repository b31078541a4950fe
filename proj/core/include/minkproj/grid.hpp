#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace minkproj {

using Vector = std::vector<double>;

/// Regular 2D or 3D grid.
///
/// Vectorization order: the first axis varies fastest. For a 2D grid with
/// dims (n_z, n_x) the cell (iz, ix) sits at iz + n_z * ix, so the flat
/// vector is the column-major layout of the n_z x n_x matrix. For a 3D video
/// grid (n_x, n_y, n_t) time is the slowest axis and every frame is a
/// contiguous block of n_x * n_y values.
class ModelGrid {
public:
    ModelGrid() = default;
    explicit ModelGrid(std::vector<std::size_t> dims, std::vector<std::string> labels = {});

    std::size_t ndims() const noexcept { return dims_.size(); }
    std::size_t size() const noexcept { return size_; }
    std::size_t extent(std::size_t axis) const;
    /// Distance in the flat vector between neighbours along `axis`.
    std::size_t stride(std::size_t axis) const;
    const std::vector<std::size_t>& dims() const noexcept { return dims_; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }

    std::size_t index(std::span<const std::size_t> subscript) const;

    /// Number of cells in one slice along the slowest axis (a frame for 3D).
    std::size_t slice_size() const;
    std::size_t slice_count() const { return dims_.back(); }

    bool operator==(const ModelGrid& other) const { return dims_ == other.dims_; }

    std::string describe() const;

private:
    std::vector<std::size_t> dims_;
    std::vector<std::string> labels_;
    std::size_t size_ = 0;
};

/// Real values on a grid. Length always equals grid.size(); entries are finite.
class ModelVector {
public:
    ModelVector() = default;
    ModelVector(ModelGrid grid, Vector data);

    static ModelVector zeros(const ModelGrid& grid);
    static ModelVector constant(const ModelGrid& grid, double value);

    const ModelGrid& grid() const noexcept { return grid_; }
    const Vector& values() const noexcept { return data_; }
    std::span<const double> span() const noexcept { return data_; }
    std::size_t size() const noexcept { return data_.size(); }
    double operator[](std::size_t i) const { return data_[i]; }

    /// Moves the storage out, leaving this vector empty.
    Vector release() && { return std::move(data_); }

private:
    ModelGrid grid_;
    Vector data_;
};

/// x = (u; v): the two additive components on one grid.
class StackedVector {
public:
    StackedVector(ModelVector u, ModelVector v);

    const ModelVector& u() const noexcept { return u_; }
    const ModelVector& v() const noexcept { return v_; }
    const ModelGrid& grid() const noexcept { return u_.grid(); }
    std::size_t size() const noexcept { return 2 * u_.size(); }

    /// Flat 2N layout [u; v].
    Vector flat() const;
    static StackedVector from_flat(const ModelGrid& grid, std::span<const double> x);

private:
    ModelVector u_;
    ModelVector v_;
};

StackedVector join(ModelVector u, ModelVector v);
std::pair<ModelVector, ModelVector> split(const StackedVector& x);
ModelVector sum_of(const StackedVector& x);

/// Converts C-order data (last axis fastest, as printed) to the grid order.
ModelVector vectorize(const ModelGrid& grid, std::span<const double> c_order);
/// 2D convenience: rows[iz][ix].
ModelVector vectorize(const ModelGrid& grid, const std::vector<std::vector<double>>& rows);
/// Inverse of vectorize: returns C-order data.
Vector devectorize(const ModelVector& m);

/// n_z x n_x matrix view of a 2D model.
Eigen::MatrixXd matricize_2d(const ModelVector& m);
ModelVector dematricize_2d(const ModelGrid& grid, const Eigen::MatrixXd& matrix);

} // namespace minkproj
