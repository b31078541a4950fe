#include "minkproj/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "minkproj/error.hpp"
#include "minkproj/io.hpp"

namespace minkproj {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

/// Problem at a specific location; collected, not fatal to the whole parse.
struct Bad {
    std::string message;
};

/// JSON object view that remembers which keys were read, so leftovers can be
/// reported as unknown.
class Node {
public:
    Node(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object()) {
            throw Bad{path_ + ": expected an object"};
        }
    }

    const std::string& path() const { return path_; }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json* find(const std::string& key)
    {
        used_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    const json& need(const std::string& key)
    {
        const auto* v = find(key);
        if (!v) {
            throw Bad{at(key) + ": required key missing"};
        }
        return *v;
    }

    Node child(const std::string& key) { return Node(need(key), at(key)); }

    std::string at(const std::string& key) const { return path_ + "." + key; }

    double number(const std::string& key)
    {
        const auto& v = need(key);
        if (!v.is_number()) {
            throw Bad{at(key) + ": expected a number"};
        }
        return v.get<double>();
    }

    double number(const std::string& key, double fallback) { return has(key) ? number(key) : (find(key), fallback); }

    std::size_t count(const std::string& key)
    {
        const auto& v = need(key);
        if (!v.is_number_integer() || v.get<long long>() < 0) {
            throw Bad{at(key) + ": expected a non-negative integer"};
        }
        return v.get<std::size_t>();
    }

    std::size_t count(const std::string& key, std::size_t fallback)
    {
        return has(key) ? count(key) : (find(key), fallback);
    }

    bool flag(const std::string& key, bool fallback)
    {
        const auto* v = find(key);
        if (!v) {
            return fallback;
        }
        if (!v->is_boolean()) {
            throw Bad{at(key) + ": expected true or false"};
        }
        return v->get<bool>();
    }

    std::string text(const std::string& key)
    {
        const auto& v = need(key);
        if (!v.is_string()) {
            throw Bad{at(key) + ": expected a string"};
        }
        return v.get<std::string>();
    }

    /// Unknown keys, one issue each.
    void finish(std::vector<std::string>& issues) const
    {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!used_.count(it.key())) {
                issues.push_back(at(it.key()) + ": unknown key");
            }
        }
    }

    void finish() const
    {
        std::vector<std::string> issues;
        finish(issues);
        if (!issues.empty()) {
            throw Bad{issues.front()};
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

class Parser {
public:
    Parser(fs::path source) : source_(std::move(source)), base_(source_.parent_path()) {}

    fs::path resolve(const std::string& p) const
    {
        fs::path path(p);
        return path.is_absolute() ? path : base_ / path;
    }

    fs::path existing(const std::string& p, const std::string& where) const
    {
        auto path = resolve(p);
        if (!fs::exists(path)) {
            throw Bad{where + ": file not found: " + path.string()};
        }
        return path;
    }

    /// Number, array, null (infinite with the given sign), or {"file": grid file}.
    Vector values(const json& v, const std::string& where, double null_value = std::nan(""))
    {
        if (v.is_null() && !std::isnan(null_value)) {
            return {null_value};
        }
        if (v.is_number()) {
            return {v.get<double>()};
        }
        if (v.is_array()) {
            Vector out;
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (!v[i].is_number()) {
                    throw Bad{where + "[" + std::to_string(i) + "]: expected a number"};
                }
                out.push_back(v[i].get<double>());
            }
            if (out.empty()) {
                throw Bad{where + ": empty array"};
            }
            return out;
        }
        if (v.is_object()) {
            Node n(v, where);
            const auto path = existing(n.text("file"), n.at("file"));
            n.finish();
            try {
                return read_grid(path).values();
            } catch (const Error& e) {
                throw Bad{where + ": " + e.what()};
            }
        }
        throw Bad{where + ": expected a number, an array, or {\"file\": ...}"};
    }

    Bound bound(Node& n, const std::string& key, double null_value)
    {
        const auto* v = n.find(key);
        if (!v) {
            return Bound(null_value);
        }
        return Bound(values(*v, n.at(key), null_value));
    }

    Vector full_vector(const json& v, const std::string& where, std::size_t n)
    {
        auto out = values(v, where);
        if (out.size() == 1 && n != 1) {
            out.assign(n, out[0]);
        }
        if (out.size() != n) {
            throw Bad{where + ": has " + std::to_string(out.size()) + " entries, expected " + std::to_string(n)};
        }
        return out;
    }

    ModelVector model(const json& v, const std::string& where, const std::optional<ModelGrid>& grid)
    {
        if (v.is_object() && grid_file_only(v)) {
            Node n(v, where);
            const auto path = existing(n.text("file"), n.at("file"));
            n.finish();
            ModelVector m;
            try {
                m = read_grid(path);
            } catch (const Error& e) {
                throw Bad{where + ": " + e.what()};
            }
            if (grid && !(m.grid() == *grid)) {
                throw Bad{where + ": file grid " + m.grid().describe() + " differs from config grid "
                          + grid->describe()};
            }
            if (grid) {
                return ModelVector(*grid, std::move(m).release());
            }
            return m;
        }
        if (!grid) {
            throw Bad{where + ": inline values need a grid section"};
        }
        return ModelVector(*grid, full_vector(v, where, grid->size()));
    }

    static bool grid_file_only(const json& v) { return v.contains("file"); }

    SparseMatrix sparse(const json& v, const std::string& where, std::size_t cols)
    {
        if (v.is_string() && v.get<std::string>() == "identity") {
            return SparseMatrix::identity(cols);
        }
        if (!v.is_string()) {
            throw Bad{where + ": expected \"identity\" or a sparse operator file name"};
        }
        SparseMatrix a;
        try {
            a = read_sparse(existing(v.get<std::string>(), where));
        } catch (const Error& e) {
            throw Bad{where + ": " + e.what()};
        }
        if (a.cols() != cols) {
            throw Bad{where + ": operator has " + std::to_string(a.cols()) + " columns, grid has "
                      + std::to_string(cols) + " cells"};
        }
        return a;
    }

    const fs::path& source() const { return source_; }

private:
    fs::path source_;
    fs::path base_;
};

ModelGrid parse_grid(Node n)
{
    const auto& dims = n.need("dims");
    if (!dims.is_array()) {
        throw Bad{n.at("dims") + ": expected an array of extents"};
    }
    std::vector<std::size_t> extents;
    for (const auto& d : dims) {
        if (!d.is_number_integer() || d.get<long long>() < 1) {
            throw Bad{n.at("dims") + ": extents must be positive integers"};
        }
        extents.push_back(d.get<std::size_t>());
    }
    std::vector<std::string> labels;
    if (const auto* l = n.find("labels")) {
        if (!l->is_array()) {
            throw Bad{n.at("labels") + ": expected an array of names"};
        }
        for (const auto& s : *l) {
            if (!s.is_string()) {
                throw Bad{n.at("labels") + ": expected strings"};
            }
            labels.push_back(s.get<std::string>());
        }
    }
    n.finish();
    try {
        return ModelGrid(std::move(extents), std::move(labels));
    } catch (const Error& e) {
        throw Bad{n.path() + ": " + e.what()};
    }
}

std::size_t parse_axis(const json& v, const ModelGrid& grid, const std::string& where)
{
    if (v.is_number_integer()) {
        const auto a = v.get<long long>();
        if (a < 0 || static_cast<std::size_t>(a) >= grid.ndims()) {
            throw Bad{where + ": axis " + std::to_string(a) + " out of range"};
        }
        return static_cast<std::size_t>(a);
    }
    if (v.is_string()) {
        const auto& labels = grid.labels();
        for (std::size_t a = 0; a < labels.size(); ++a) {
            if (labels[a] == v.get<std::string>()) {
                return a;
            }
        }
        throw Bad{where + ": unknown axis label '" + v.get<std::string>() + "'"};
    }
    throw Bad{where + ": expected an axis index or label"};
}

LinearOperatorSpec parse_transform(const json* v, const std::string& where, const ModelGrid& grid, Parser& p)
{
    if (!v) {
        return LinearOperatorSpec::identity();
    }
    if (v->is_string()) {
        const auto s = v->get<std::string>();
        if (s == "identity") {
            return LinearOperatorSpec::identity();
        }
        if (s == "gradient") {
            return LinearOperatorSpec::gradient();
        }
        throw Bad{where + ": unknown transform '" + s + "'"};
    }
    Node n(*v, where);
    std::optional<LinearOperatorSpec> out;
    if (n.has("derivative")) {
        out = LinearOperatorSpec::derivative(parse_axis(n.need("derivative"), grid, n.at("derivative")));
    } else if (n.has("gradient")) {
        const auto& axes = n.need("gradient");
        if (!axes.is_array()) {
            throw Bad{n.at("gradient") + ": expected an array of axes"};
        }
        std::vector<std::size_t> list;
        for (const auto& a : axes) {
            list.push_back(parse_axis(a, grid, n.at("gradient")));
        }
        out = LinearOperatorSpec::gradient(std::move(list));
    } else if (n.has("custom")) {
        const auto name = n.text("custom");
        out = LinearOperatorSpec::custom(p.sparse(json(name), n.at("custom"), grid.size()), name);
    } else {
        throw Bad{where + ": expected one of derivative, gradient, custom"};
    }
    n.finish();
    return *out;
}

std::vector<IndexRange> parse_slices(Node& n, std::size_t dim, const ModelGrid& grid)
{
    const bool per_slice = n.flag("per_slice", false);
    const auto length = n.count("slice_length", 0);
    if (per_slice && length) {
        throw Bad{n.path() + ": give per_slice or slice_length, not both"};
    }
    try {
        if (per_slice) {
            if (dim % grid.slice_count() != 0) {
                throw Bad{n.path() + ": transform output does not split into " + std::to_string(grid.slice_count())
                          + " slices"};
            }
            return contiguous_slices(dim, dim / grid.slice_count());
        }
        if (length) {
            return contiguous_slices(dim, length);
        }
    } catch (const Error& e) {
        throw Bad{n.path() + ": " + e.what()};
    }
    return {};
}

ElementarySet parse_set(Node& n, const LinearOperatorSpec& transform, const ModelGrid& grid, Parser& p)
{
    const auto kind = n.text("kind");
    constexpr double inf = std::numeric_limits<double>::infinity();
    const auto dim = transform.output_size(grid);
    auto center = [&] { return n.has("center") ? p.full_vector(n.need("center"), n.at("center"), dim) : Vector{}; };
    try {
        if (kind == "box") {
            return ElementarySet::box(p.bound(n, "lower", -inf), p.bound(n, "upper", inf));
        }
        if (kind == "fixed") {
            return ElementarySet::fixed(Bound(p.values(n.need("value"), n.at("value"))));
        }
        if (kind == "l1_ball") {
            return ElementarySet::l1_ball(n.number("sigma"));
        }
        if (kind == "l2_ball") {
            const double sigma = n.number("sigma");
            return ElementarySet::l2_ball(sigma, center());
        }
        if (kind == "l2_annulus") {
            const double lo = n.number("sigma_lower");
            const double hi = n.number("sigma_upper");
            return ElementarySet::l2_annulus(lo, hi, center());
        }
        if (kind == "cardinality") {
            const auto k = n.count("k");
            return ElementarySet::cardinality(k, parse_slices(n, dim, grid));
        }
        if (kind == "rank") {
            const auto r = n.count("rank");
            std::size_t rows = 0, cols = 0;
            if (n.has("rows") || n.has("cols")) {
                rows = n.count("rows");
                cols = n.count("cols");
            } else if (transform.is_identity()) {
                rows = grid.extent(0);
                cols = grid.extent(1);
            } else {
                throw Bad{n.path() + ": rank on a transformed vector needs explicit rows and cols"};
            }
            return ElementarySet::rank(r, rows, cols);
        }
        if (kind == "subspace") {
            // Columns of a 2D grid file (rows = first axis) are training vectors.
            const auto path = p.existing(n.text("training"), n.at("training"));
            const auto t = read_grid(path);
            if (t.grid().ndims() != 2) {
                throw Bad{n.at("training") + ": training file must hold a 2D grid (vector length x count)"};
            }
            return ElementarySet::subspace_from_training(matricize_2d(t));
        }
        if (kind == "pointwise_datafit") {
            auto observed = p.full_vector(n.need("observed"), n.at("observed"), dim);
            return ElementarySet::pointwise_datafit(std::move(observed), p.bound(n, "lower", -inf),
                                                    p.bound(n, "upper", inf));
        }
    } catch (const SpecError& e) {
        std::string joined;
        for (const auto& i : e.issues()) {
            joined += (joined.empty() ? "" : "; ") + i;
        }
        throw Bad{n.path() + ": " + joined};
    } catch (const Error& e) {
        throw Bad{n.path() + ": " + e.what()};
    }
    throw Bad{n.at("kind") + ": unknown set kind '" + kind + "'"};
}

Target parse_target(const std::string& s, const std::string& where)
{
    if (s == "u" || s == "component_u") {
        return Target::component_u;
    }
    if (s == "v" || s == "component_v") {
        return Target::component_v;
    }
    if (s == "sum") {
        return Target::sum;
    }
    throw Bad{where + ": target must be u, v, or sum"};
}

void parse_admm(Node n, AdmmOptions& o)
{
    o.max_iters = n.count("max_iters", o.max_iters);
    o.eps_primal = n.number("eps_primal", o.eps_primal);
    o.eps_dual = n.number("eps_dual", o.eps_dual);
    o.cg_tol = n.number("cg_tol", o.cg_tol);
    o.cg_max_iters = n.count("cg_max_iters", o.cg_max_iters);
    o.rho_init = n.number("rho_init", o.rho_init);
    o.gamma = n.number("gamma", o.gamma);
    o.adapt = n.flag("adapt", o.adapt);
    o.adapt_every = n.count("adapt_every", o.adapt_every);
    o.adapt_factor_cap = n.number("adapt_factor_cap", o.adapt_factor_cap);
    o.adapt_imbalance = n.number("adapt_imbalance", o.adapt_imbalance);
    o.adapt_step = n.number("adapt_step", o.adapt_step);
    o.adapt_freeze_after = n.count("adapt_freeze_after", o.adapt_freeze_after);
    o.nonconvex_rho_growth = n.number("nonconvex_rho_growth", o.nonconvex_rho_growth);
    o.stagnation_window = n.count("stagnation_window", o.stagnation_window);
    o.banded_view = n.flag("banded_view", o.banded_view);
    n.finish();
}

void parse_spg(Node n, SpgOptions& o)
{
    o.max_iters = n.count("max_iters", o.max_iters);
    o.ls_memory = n.count("ls_memory", o.ls_memory);
    o.alpha_min = n.number("alpha_min", o.alpha_min);
    o.alpha_max = n.number("alpha_max", o.alpha_max);
    o.sufficient_decrease = n.number("sufficient_decrease", o.sufficient_decrease);
    o.backtrack = n.number("backtrack", o.backtrack);
    o.min_step = n.number("min_step", o.min_step);
    o.stationarity_tol = n.number("stationarity_tol", o.stationarity_tol);
    o.feasibility_tol = n.number("feasibility_tol", o.feasibility_tol);
    n.finish();
}

std::optional<std::size_t> parse_budget(Node& n, const std::string& key)
{
    const auto* v = n.find(key);
    if (!v) {
        return std::nullopt;
    }
    if (v->is_number_integer() && v->get<long long>() >= 0) {
        return v->get<std::size_t>();
    }
    Node b(*v, n.at(key));
    const auto budget = derivative_budget(b.count("persons"), b.count("pixels"), b.count("boundaries"));
    b.finish();
    return budget;
}

GenerateConfig parse_generate(Node n)
{
    GenerateConfig g;
    const auto kind = n.text("kind");
    if (kind == "blocky-anomaly-2d") {
        BlockyParams b;
        b.nz = n.count("nz", b.nz);
        b.nx = n.count("nx", b.nx);
        b.background = n.number("background", b.background);
        b.anomaly_min = n.number("anomaly_min", b.anomaly_min);
        b.anomaly_max = n.number("anomaly_max", b.anomaly_max);
        b.min_fraction = n.number("min_fraction", b.min_fraction);
        b.max_fraction = n.number("max_fraction", b.max_fraction);
        if (n.has("mask_fraction")) {
            g.mask_fraction = n.number("mask_fraction");
        } else {
            n.find("mask_fraction");
        }
        g.params = b;
    } else if (kind == "lowrank-sparse-video") {
        VideoParams v;
        v.nx = n.count("nx", v.nx);
        v.ny = n.count("ny", v.ny);
        v.nt = n.count("nt", v.nt);
        v.training_frames = n.count("training_frames", v.training_frames);
        v.rank = n.count("rank", v.rank);
        v.persons = n.count("persons", v.persons);
        v.person_width = n.count("person_width", v.person_width);
        v.person_height = n.count("person_height", v.person_height);
        v.intensity_min = n.number("intensity_min", v.intensity_min);
        v.intensity_max = n.number("intensity_max", v.intensity_max);
        v.value_min = n.number("value_min", v.value_min);
        v.value_max = n.number("value_max", v.value_max);
        g.params = v;
    } else {
        throw Bad{n.at("kind") + ": unknown generator '" + kind + "' (blocky-anomaly-2d, lowrank-sparse-video)"};
    }
    n.finish();
    return g;
}

} // namespace

ObjectiveOracle make_oracle(const ObjectiveConfig& objective)
{
    if (const auto* p = std::get_if<ProximityObjective>(&objective.kind)) {
        const auto target = p->target;
        return [target](const ModelVector& m) {
            if (!(m.grid() == target.grid())) {
                throw ShapeError("objective target grid differs from the model grid");
            }
            Evaluation e{0.0, Vector(m.size())};
            for (std::size_t i = 0; i < m.size(); ++i) {
                e.gradient[i] = m[i] - target[i];
                e.value += 0.5 * e.gradient[i] * e.gradient[i];
            }
            return e;
        };
    }
    const auto ls = std::get<LeastSquaresObjective>(objective.kind);
    return [ls](const ModelVector& m) {
        auto r = ls.forward.matvec(m.span());
        double f = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            r[i] -= ls.observed[i];
            f += 0.5 * r[i] * r[i];
        }
        return Evaluation{f, ls.forward.rmatvec(r)};
    };
}

RunConfig parse_config(const std::string& text, const fs::path& source)
{
    json root;
    try {
        root = json::parse(text, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw SpecError({source.string() + ": not valid JSON: " + e.what()});
    }
    RunConfig cfg;
    cfg.source = source;
    std::vector<std::string> issues;
    Parser p(source);
    std::optional<Node> top;
    try {
        top.emplace(root, "config");
    } catch (const Bad& b) {
        throw SpecError({source.string() + ": " + b.message});
    }
    auto section = [&](auto&& fn) {
        try {
            fn();
        } catch (const Bad& b) {
            issues.push_back(b.message);
        }
    };

    std::optional<ModelGrid> grid;
    section([&] {
        if (top->has("grid")) {
            grid = parse_grid(top->child("grid"));
        } else {
            top->find("grid");
        }
    });
    section([&] {
        cfg.seed = top->count("seed", 0);
        cfg.threads = top->count("threads", 0);
        cfg.pgm = top->flag("pgm", false);
    });
    section([&] {
        if (top->has("admm")) {
            parse_admm(top->child("admm"), cfg.admm);
        } else {
            top->find("admm");
        }
    });
    section([&] {
        if (top->has("spg")) {
            parse_spg(top->child("spg"), cfg.spg);
        } else {
            top->find("spg");
        }
    });

    if (const auto* sets = top->find("sets")) {
        if (!grid) {
            issues.push_back("config.sets: needs a grid section");
        } else if (!sets->is_array()) {
            issues.push_back("config.sets: expected an array");
        } else {
            GeneralizedMinkowskiSpec spec(*grid);
            bool complete = true;
            for (std::size_t i = 0; i < sets->size(); ++i) {
                std::string where = "config.sets[" + std::to_string(i) + "]";
                try {
                    Node probe((*sets)[i], where);
                    std::string label = probe.has("label") ? probe.text("label") : "set " + std::to_string(i);
                    Node named((*sets)[i], where + " '" + label + "'");
                    const auto target = parse_target(named.text("target"), named.at("target"));
                    const auto transform = parse_transform(named.find("transform"), named.at("transform"), *grid, p);
                    named.find("label");
                    auto set = parse_set(named, transform, *grid, p);
                    named.finish(issues);
                    spec.add({target, transform, std::move(set), std::move(label)});
                } catch (const Bad& b) {
                    issues.push_back(b.message);
                    complete = false;
                }
            }
            if (complete) {
                auto v = validate(spec);
                for (auto& e : v.errors) {
                    issues.push_back("config.sets: " + e);
                }
                cfg.spec = std::move(spec);
            }
        }
    }

    section([&] {
        if (const auto* v = top->find("input")) {
            cfg.input = p.model(*v, "config.input", grid);
        }
    });

    section([&] {
        const auto* v = top->find("datafit");
        if (!v) {
            return;
        }
        if (!grid) {
            throw Bad{"config.datafit: needs a grid section"};
        }
        Node n(*v, "config.datafit");
        auto forward = p.sparse(n.need("forward"), n.at("forward"), grid->size());
        auto observed = p.full_vector(n.need("observed"), n.at("observed"), forward.rows());
        const auto fit = n.text("fit");
        constexpr double inf = std::numeric_limits<double>::infinity();
        try {
            if (fit == "pointwise") {
                auto lo = p.bound(n, "lower", -inf);
                auto hi = p.bound(n, "upper", inf);
                cfg.datafit = DataFitConstraint::pointwise(std::move(forward), std::move(observed), std::move(lo),
                                                           std::move(hi));
            } else if (fit == "annulus") {
                const double lo = n.number("sigma_lower");
                const double hi = n.number("sigma_upper");
                cfg.datafit = DataFitConstraint::annulus(std::move(forward), std::move(observed), lo, hi);
            } else {
                throw Bad{n.at("fit") + ": expected pointwise or annulus"};
            }
        } catch (const SpecError& e) {
            throw Bad{"config.datafit: " + e.issues().front()};
        }
        n.finish();
    });

    section([&] {
        const auto* v = top->find("objective");
        if (!v) {
            return;
        }
        Node n(*v, "config.objective");
        ObjectiveConfig o;
        const auto kind = n.text("kind");
        if (kind == "proximity") {
            o.kind = ProximityObjective{p.model(n.need("target"), n.at("target"), grid)};
        } else if (kind == "least_squares") {
            if (!grid) {
                throw Bad{"config.objective: needs a grid section"};
            }
            auto forward = p.sparse(n.need("forward"), n.at("forward"), grid->size());
            auto observed = p.full_vector(n.need("observed"), n.at("observed"), forward.rows());
            o.kind = LeastSquaresObjective{std::move(forward), std::move(observed)};
        } else {
            throw Bad{n.at("kind") + ": expected proximity or least_squares"};
        }
        if (const auto* init = n.find("initial")) {
            o.initial = p.model(*init, n.at("initial"), grid);
        }
        n.finish();
        cfg.objective = std::move(o);
    });

    section([&] {
        const auto* v = top->find("video");
        if (!v) {
            return;
        }
        Node n(*v, "config.video");
        VideoConfig vc;
        vc.input = p.existing(n.text("input"), n.at("input"));
        vc.options.training_frames = n.count("training_frames");
        vc.options.value_min = n.number("value_min", vc.options.value_min);
        vc.options.value_max = n.number("value_max", vc.options.value_max);
        if (n.has("anomaly_budget")) {
            vc.options.anomaly_budget = n.count("anomaly_budget");
        } else {
            n.find("anomaly_budget");
        }
        vc.options.vertical_budget = parse_budget(n, "vertical_budget");
        vc.options.horizontal_budget = parse_budget(n, "horizontal_budget");
        vc.options.subspace_with_constant = n.flag("subspace_with_constant", vc.options.subspace_with_constant);
        n.finish();
        cfg.video = std::move(vc);
    });

    section([&] {
        const auto* v = top->find("sample");
        if (!v) {
            return;
        }
        Node n(*v, "config.sample");
        cfg.sample.low = n.number("low", cfg.sample.low);
        cfg.sample.high = n.number("high", cfg.sample.high);
        n.finish();
        if (!(cfg.sample.low < cfg.sample.high)) {
            throw Bad{"config.sample: low must be below high"};
        }
    });

    section([&] {
        if (top->has("generate")) {
            cfg.generate = parse_generate(top->child("generate"));
        } else {
            top->find("generate");
        }
    });

    top->finish(issues);
    section([&] {
        try {
            check_options(cfg.admm);
        } catch (const SpecError& e) {
            for (const auto& i : e.issues()) {
                issues.push_back("config.admm: " + i);
            }
        }
        try {
            check_options(cfg.spg);
        } catch (const SpecError& e) {
            for (const auto& i : e.issues()) {
                issues.push_back("config.spg: " + i);
            }
        }
    });
    if (!issues.empty()) {
        for (auto& i : issues) {
            i = source.string() + ": " + i;
        }
        throw SpecError(std::move(issues));
    }
    if (cfg.video) {
        cfg.video->options.admm = cfg.admm;
    }
    return cfg;
}

RunConfig load_config(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config " + path.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

} // namespace minkproj
