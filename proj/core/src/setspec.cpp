#include "minkproj/setspec.hpp"

#include "minkproj/error.hpp"

namespace minkproj {

std::string to_string(Target t)
{
    switch (t) {
    case Target::component_u:
        return "component_u";
    case Target::component_v:
        return "component_v";
    case Target::sum:
        return "sum";
    }
    return "?";
}

GeneralizedMinkowskiSpec::GeneralizedMinkowskiSpec(ModelGrid grid, std::vector<SetDescriptor> descriptors)
    : grid_(std::move(grid))
{
    for (auto& d : descriptors) {
        add(std::move(d));
    }
}

GeneralizedMinkowskiSpec& GeneralizedMinkowskiSpec::add(SetDescriptor descriptor)
{
    switch (descriptor.target) {
    case Target::component_u:
        d_sets_.push_back(std::move(descriptor));
        break;
    case Target::component_v:
        e_sets_.push_back(std::move(descriptor));
        break;
    case Target::sum:
        f_sets_.push_back(std::move(descriptor));
        break;
    }
    return *this;
}

bool GeneralizedMinkowskiSpec::all_convex() const
{
    for (const auto* d : ordered()) {
        if (!d->set.is_convex()) {
            return false;
        }
    }
    return true;
}

std::vector<const SetDescriptor*> GeneralizedMinkowskiSpec::ordered() const
{
    std::vector<const SetDescriptor*> out;
    out.reserve(p() + q() + r());
    for (const auto* group : {&d_sets_, &e_sets_, &f_sets_}) {
        for (const auto& d : *group) {
            out.push_back(&d);
        }
    }
    return out;
}

namespace {

bool is_identity_bound(const SetDescriptor& d)
{
    if (!d.transform.is_identity()) {
        return false;
    }
    const auto& k = d.set.kind();
    return std::holds_alternative<sets::Box>(k) || std::holds_alternative<sets::Fixed>(k);
}

} // namespace

ValidationResult validate(const GeneralizedMinkowskiSpec& spec)
{
    ValidationResult result;
    auto& errors = result.errors;
    if (spec.grid().size() == 0) {
        errors.push_back("grid is empty");
        return result;
    }
    if (spec.p() == 0) {
        errors.push_back("component u unconstrained: at least one D-set is required");
    }
    if (spec.q() == 0) {
        errors.push_back("component v unconstrained: at least one E-set is required");
    }
    auto has_identity_bound = [](const std::vector<SetDescriptor>& list) {
        for (const auto& d : list) {
            if (is_identity_bound(d)) {
                return true;
            }
        }
        return false;
    };
    if (spec.p() > 0 && !has_identity_bound(spec.d_sets())) {
        errors.push_back("component u needs an identity-transform box or fixed set (full column rank)");
    }
    if (spec.q() > 0 && !has_identity_bound(spec.e_sets())) {
        errors.push_back("component v needs an identity-transform box or fixed set (full column rank)");
    }
    for (const auto* d : spec.ordered()) {
        const std::string where = "set '" + d->label + "' (" + to_string(d->target) + ", " + d->set.kind_name()
                                  + ", " + d->transform.describe() + "): ";
        auto op_issues = d->transform.check(spec.grid());
        for (auto& issue : op_issues) {
            errors.push_back(where + issue);
        }
        if (!op_issues.empty()) {
            continue;
        }
        for (auto& issue : d->set.check(d->transform.output_size(spec.grid()))) {
            errors.push_back(where + issue);
        }
    }
    return result;
}

void require_valid(const GeneralizedMinkowskiSpec& spec)
{
    auto result = validate(spec);
    if (!result.ok()) {
        throw SpecError(std::move(result.errors));
    }
}

std::vector<std::string> Membership::violations() const
{
    std::vector<std::string> out;
    for (const auto& d : distances) {
        if (d.violated) {
            out.push_back(d.label);
        }
    }
    return out;
}

Membership is_member(const GeneralizedMinkowskiSpec& spec, const ModelVector& u, const ModelVector& v, double tol)
{
    if (!(u.grid() == spec.grid()) || !(v.grid() == spec.grid())) {
        throw ShapeError("components do not live on the spec grid " + spec.grid().describe());
    }
    Vector w(u.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = u[i] + v[i];
    }
    Membership m;
    for (const auto* d : spec.ordered()) {
        const std::span<const double> x = d->target == Target::component_u   ? u.span()
                                          : d->target == Target::component_v ? v.span()
                                                                             : std::span<const double>(w);
        const double dist = feasibility_distance(x, d->set, d->transform.materialize(spec.grid()));
        const bool bad = dist > tol;
        m.member = m.member && !bad;
        m.distances.push_back({d->label, d->target, dist, bad});
    }
    return m;
}

} // namespace minkproj
