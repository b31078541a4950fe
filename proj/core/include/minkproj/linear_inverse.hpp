#pragma once

#include <optional>
#include <string>

#include "minkproj/admm.hpp"
#include "minkproj/prox.hpp"
#include "minkproj/setspec.hpp"
#include "minkproj/sparse.hpp"

namespace minkproj {

/// Data-fit set {m : G m in fit}, where fit is either pointwise bounds on
/// G m - d_obs or an annulus sigma_l <= ||G m - d_obs|| <= sigma_u.
class DataFitConstraint {
public:
    static DataFitConstraint pointwise(SparseMatrix forward, Vector observed, Bound lower, Bound upper);
    static DataFitConstraint annulus(SparseMatrix forward, Vector observed, double sigma_lower, double sigma_upper);

    const SparseMatrix& forward() const noexcept { return forward_; }
    const Vector& observed() const noexcept { return observed_; }
    const ElementarySet& fit() const noexcept { return fit_; }

    /// Sum-target descriptor with the forward operator as transform.
    SetDescriptor descriptor(std::string label = "datafit") const;

private:
    DataFitConstraint(SparseMatrix forward, Vector observed, ElementarySet fit);

    SparseMatrix forward_;
    Vector observed_;
    ElementarySet fit_;
};

/// Copy of `spec` with the data-fit row appended after the other sum sets.
GeneralizedMinkowskiSpec with_datafit(const GeneralizedMinkowskiSpec& spec, const DataFitConstraint& dfc,
                                      std::string label = "datafit");

/// Projection of m onto M intersected with the data-fit set. Without a
/// constraint this is admm_project.
Projection project_with_datafit(const ModelVector& m, const GeneralizedMinkowskiSpec& spec,
                                const std::optional<DataFitConstraint>& dfc, const AdmmOptions& opts = {});

} // namespace minkproj
