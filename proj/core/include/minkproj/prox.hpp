#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "minkproj/grid.hpp"
#include "minkproj/operators.hpp"

namespace minkproj {

/// Half-open range [begin, begin + length) of a vector.
struct IndexRange {
    std::size_t begin;
    std::size_t length;

    bool operator==(const IndexRange&) const = default;
};

/// Splits [0, total) into consecutive ranges of `slice_length` entries.
std::vector<IndexRange> contiguous_slices(std::size_t total, std::size_t slice_length);

/// Scalar or per-entry parameter. A single value broadcasts to every entry.
class Bound {
public:
    Bound(double value) : values_{value} {}
    Bound(Vector values) : values_(std::move(values)) {}

    double operator[](std::size_t i) const { return values_.size() == 1 ? values_[0] : values_[i]; }
    bool is_scalar() const noexcept { return values_.size() == 1; }
    std::size_t size() const noexcept { return values_.size(); }
    const Vector& values() const noexcept { return values_; }

private:
    Vector values_;
};

/// Closed-form projection targets. Each kind is a plain parameter record;
/// ElementarySet validates and dispatches.
namespace sets {

struct Box {
    Bound lower;
    Bound upper;
};

struct Fixed {
    Bound value;
};

struct L1Ball {
    double sigma;
};

/// sigma_lower <= ||y - center||_2 <= sigma_upper. sigma_lower = 0 is the ball.
struct L2Annulus {
    double sigma_lower;
    double sigma_upper;
    Vector center; // empty: origin
};

/// At most k nonzeros per slice (whole vector when slices is empty).
struct Cardinality {
    std::size_t k;
    std::vector<IndexRange> slices;
};

/// Every consecutive block of rows * cols entries, read as a column-major
/// rows x cols matrix, has rank <= rank.
struct Rank {
    std::size_t rank;
    std::size_t rows;
    std::size_t cols;
};

/// Every consecutive block of basis.rows() entries lies in span(basis).
struct Subspace {
    std::shared_ptr<const Eigen::MatrixXd> basis; // orthonormal columns
};

/// lower <= (y - observed)[i] <= upper.
struct PointwiseDataFit {
    Vector observed;
    Bound lower;
    Bound upper;
};

} // namespace sets

class ElementarySet {
public:
    using Kind = std::variant<sets::Box, sets::Fixed, sets::L1Ball, sets::L2Annulus, sets::Cardinality,
                              sets::Rank, sets::Subspace, sets::PointwiseDataFit>;

    /// Throws SpecError when the parameters are inconsistent (l > u, sigma < 0, ...).
    static ElementarySet box(Bound lower, Bound upper);
    static ElementarySet fixed(Bound value);
    static ElementarySet l1_ball(double sigma);
    static ElementarySet l2_ball(double sigma, Vector center = {});
    static ElementarySet l2_annulus(double sigma_lower, double sigma_upper, Vector center = {});
    static ElementarySet cardinality(std::size_t k, std::vector<IndexRange> slices = {});
    static ElementarySet rank(std::size_t rank, std::size_t rows, std::size_t cols);
    /// `basis` must already have orthonormal columns (checked to 1e-10).
    static ElementarySet subspace(Eigen::MatrixXd basis);
    /// Orthonormal basis for span(training) via a thin SVD; columns are frames.
    static ElementarySet subspace_from_training(const Eigen::MatrixXd& training);
    static ElementarySet pointwise_datafit(Vector observed, Bound lower, Bound upper);

    const Kind& kind() const noexcept { return kind_; }
    std::string kind_name() const;

    /// False for rank, cardinality and annuli with a positive inner radius.
    bool is_convex() const;

    /// Problems with using this set on vectors of length `dim` (empty when fine).
    std::vector<std::string> check(std::size_t dim) const;

    /// out = P(in). `in` and `out` must not overlap. Per-slice kinds split
    /// their slices over up to `threads` workers.
    void project(std::span<const double> in, std::span<double> out, std::size_t threads = 1) const;
    Vector project(std::span<const double> in) const;

private:
    explicit ElementarySet(Kind kind) : kind_(std::move(kind)) {}

    Kind kind_;
};

// Elementary projections on raw vectors.

Vector project_box(std::span<const double> y, const Bound& lower, const Bound& upper);
Vector project_fixed(std::span<const double> y, const Bound& value);
/// Euclidean projection onto {||x||_1 <= sigma} by sorting magnitudes.
Vector project_l1_ball(std::span<const double> y, double sigma);
/// Ties at y == center with sigma_lower > 0 resolve to center + sigma_lower * e_1.
Vector project_l2_annulus(std::span<const double> y, double sigma_lower, double sigma_upper,
                          std::span<const double> center = {});
/// Keeps the k largest magnitudes per slice; ties keep the lowest index.
Vector project_cardinality(std::span<const double> y, std::size_t k, const std::vector<IndexRange>& slices = {});
/// Truncated SVD of the matricized 2D model.
ModelVector project_rank(const ModelVector& y, std::size_t rank);
Vector project_subspace(std::span<const double> y, const Eigen::MatrixXd& basis);
Vector project_pointwise_datafit(std::span<const double> y, std::span<const double> observed, const Bound& lower,
                                 const Bound& upper);
/// Box projection in a derivative domain; infinite bounds leave that side open.
Vector project_monotone_derivative(std::span<const double> y, const Bound& lower, const Bound& upper);

/// ||P(Tx) - Tx||_2 / max(||Tx||_2, 1).
double feasibility_distance(std::span<const double> x, const ElementarySet& set, const SparseMatrix& transform);
double feasibility_distance(const ModelVector& x, const ElementarySet& set, const LinearOperatorSpec& transform);

} // namespace minkproj
