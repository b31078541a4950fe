#include "minkproj/linear_inverse.hpp"

#include "minkproj/error.hpp"

namespace minkproj {

DataFitConstraint::DataFitConstraint(SparseMatrix forward, Vector observed, ElementarySet fit)
    : forward_(std::move(forward)), observed_(std::move(observed)), fit_(std::move(fit))
{
    if (forward_.rows() != observed_.size()) {
        throw ShapeError("forward operator has " + std::to_string(forward_.rows()) + " rows but observed data has "
                         + std::to_string(observed_.size()) + " entries");
    }
}

DataFitConstraint DataFitConstraint::pointwise(SparseMatrix forward, Vector observed, Bound lower, Bound upper)
{
    auto fit = ElementarySet::pointwise_datafit(observed, std::move(lower), std::move(upper));
    return DataFitConstraint(std::move(forward), std::move(observed), std::move(fit));
}

DataFitConstraint DataFitConstraint::annulus(SparseMatrix forward, Vector observed, double sigma_lower,
                                             double sigma_upper)
{
    auto fit = ElementarySet::l2_annulus(sigma_lower, sigma_upper, observed);
    return DataFitConstraint(std::move(forward), std::move(observed), std::move(fit));
}

SetDescriptor DataFitConstraint::descriptor(std::string label) const
{
    return {Target::sum, LinearOperatorSpec::custom(forward_, "data-fit forward operator"), fit_, std::move(label)};
}

GeneralizedMinkowskiSpec with_datafit(const GeneralizedMinkowskiSpec& spec, const DataFitConstraint& dfc,
                                      std::string label)
{
    if (dfc.forward().cols() != spec.grid().size()) {
        throw ShapeError("forward operator has " + std::to_string(dfc.forward().cols()) + " columns, grid has "
                         + std::to_string(spec.grid().size()) + " cells");
    }
    auto out = spec;
    out.add(dfc.descriptor(std::move(label)));
    return out;
}

Projection project_with_datafit(const ModelVector& m, const GeneralizedMinkowskiSpec& spec,
                                const std::optional<DataFitConstraint>& dfc, const AdmmOptions& opts)
{
    if (!dfc) {
        return admm_project(m, spec, opts);
    }
    return admm_project(m, with_datafit(spec, *dfc), opts);
}

} // namespace minkproj
