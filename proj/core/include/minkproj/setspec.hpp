#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "minkproj/grid.hpp"
#include "minkproj/operators.hpp"
#include "minkproj/prox.hpp"

namespace minkproj {

/// Which variable a constraint acts on: u (D-sets), v (E-sets) or u + v (F-sets).
enum class Target { component_u, component_v, sum };

std::string to_string(Target t);

struct SetDescriptor {
    Target target;
    LinearOperatorSpec transform;
    ElementarySet set;
    std::string label;
};

/// Constraint collection {D_i}, {E_j}, {F_k} on one grid.
///
/// Descriptor order within each target is preserved; block rows of the
/// stacked operator follow D, then E, then F, then the (I, I) data row.
class GeneralizedMinkowskiSpec {
public:
    GeneralizedMinkowskiSpec() = default;
    explicit GeneralizedMinkowskiSpec(ModelGrid grid, std::vector<SetDescriptor> descriptors = {});

    GeneralizedMinkowskiSpec& add(SetDescriptor descriptor);

    const ModelGrid& grid() const noexcept { return grid_; }
    const std::vector<SetDescriptor>& d_sets() const noexcept { return d_sets_; }
    const std::vector<SetDescriptor>& e_sets() const noexcept { return e_sets_; }
    const std::vector<SetDescriptor>& f_sets() const noexcept { return f_sets_; }

    std::size_t p() const noexcept { return d_sets_.size(); }
    std::size_t q() const noexcept { return e_sets_.size(); }
    std::size_t r() const noexcept { return f_sets_.size(); }
    /// Number of block rows including the (I, I) row.
    std::size_t s() const noexcept { return p() + q() + r() + 1; }

    bool all_convex() const;

    /// Descriptors in block-row order (D, E, F).
    std::vector<const SetDescriptor*> ordered() const;

private:
    ModelGrid grid_;
    std::vector<SetDescriptor> d_sets_;
    std::vector<SetDescriptor> e_sets_;
    std::vector<SetDescriptor> f_sets_;
};

struct ValidationResult {
    std::vector<std::string> errors;

    bool ok() const noexcept { return errors.empty(); }
};

/// Collects every violation: transform/set dimension mismatches, missing
/// identity bound (box or fixed) on either component, bad parameters.
ValidationResult validate(const GeneralizedMinkowskiSpec& spec);
/// Throws SpecError listing every violation.
void require_valid(const GeneralizedMinkowskiSpec& spec);

/// Default tolerance for membership checks.
inline constexpr double default_member_tol = 1e-4;

struct SetDistance {
    std::string label;
    Target target;
    double distance;
    bool violated;
};

struct Membership {
    bool member = true;
    std::vector<SetDistance> distances;

    /// Labels of violated sets.
    std::vector<std::string> violations() const;
};

/// u against D-sets, v against E-sets, u + v against F-sets.
Membership is_member(const GeneralizedMinkowskiSpec& spec, const ModelVector& u, const ModelVector& v,
                     double tol = default_member_tol);

} // namespace minkproj
