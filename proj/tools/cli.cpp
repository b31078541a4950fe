#include "cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "minkproj/config.hpp"
#include "minkproj/error.hpp"
#include "minkproj/io.hpp"

namespace minkproj::cli {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

struct Flags {
    std::string config;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> max_iters;
    std::optional<double> tol;
    std::optional<std::size_t> threads;
    bool pgm = false;
};

struct Context {
    Flags flags;
    RunConfig cfg;
    fs::path out;
    std::ostream& log;
};

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream f(path, std::ios::trunc);
    if (!f) {
        throw IoError("cannot write " + path.string());
    }
    f << text;
}

ordered_json report_json(const SolveReport& r)
{
    ordered_json j;
    j["converged"] = r.converged;
    j["stagnated"] = r.stagnated;
    j["iterations"] = r.iterations;
    j["max_primal_residual"] = r.max_primal;
    j["dual_residual"] = r.dual;
    j["total_cg_iterations"] = r.total_cg_iterations;
    auto& rows = j["rows"] = ordered_json::array();
    for (const auto& row : r.rows) {
        rows.push_back({{"label", row.label}, {"primal_residual", row.primal}, {"rho", row.rho}, {"gamma", row.gamma}});
    }
    auto& feas = j["feasibility"] = ordered_json::array();
    for (const auto& d : r.feasibility) {
        feas.push_back(
            {{"label", d.label}, {"target", to_string(d.target)}, {"distance", d.distance}, {"violated", d.violated}});
    }
    j["warnings"] = r.warnings;
    return j;
}

void write_residuals(const fs::path& path, const SolveReport& r)
{
    std::string csv = "iteration,max_primal,dual,cg_iterations\n";
    for (const auto& h : r.history) {
        csv += std::to_string(h.iteration) + "," + fmt(h.max_primal) + "," + fmt(h.dual) + ","
               + std::to_string(h.cg_iterations) + "\n";
    }
    write_text(path, csv);
}

/// Report file contents exclude wall time so repeated runs compare equal.
void write_report(Context& ctx, const std::string& command, ordered_json body)
{
    ordered_json j;
    j["command"] = command;
    j["config"] = fs::path(ctx.cfg.source).filename().string();
    j["seed"] = ctx.cfg.seed;
    for (auto& [k, v] : body.items()) {
        j[k] = v;
    }
    write_text(ctx.out / "report.json", j.dump(2) + "\n");
}

void write_model(Context& ctx, const std::string& stem, const ModelVector& m)
{
    write_grid(ctx.out / (stem + ".gmsk"), m);
    if (ctx.cfg.pgm) {
        write_pgm_slices(ctx.out, stem, m);
    }
}

void summarize(std::ostream& log, const SolveReport& r, double seconds)
{
    log << (r.converged ? "converged" : "not converged") << " after " << r.iterations << " iterations ("
        << r.total_cg_iterations << " CG iterations, " << seconds << " s); max primal " << r.max_primal << ", dual "
        << r.dual << "\n";
    for (const auto& d : r.feasibility) {
        log << "  " << to_string(d.target) << " set '" << d.label << "': distance " << d.distance
            << (d.violated ? "  VIOLATED" : "") << "\n";
    }
    for (const auto& w : r.warnings) {
        log << "  warning: " << w << "\n";
    }
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void emit_projection(Context& ctx, const std::string& command, const Projection& p, double seconds)
{
    write_model(ctx, "u", p.u);
    write_model(ctx, "v", p.v);
    write_model(ctx, "w", p.w);
    write_residuals(ctx.out / "residuals.csv", p.report);
    write_report(ctx, command, {{"solve", report_json(p.report)}});
    summarize(ctx.log, p.report, seconds);
}

const GeneralizedMinkowskiSpec& need_spec(const Context& ctx, const std::string& command)
{
    if (!ctx.cfg.spec) {
        throw SpecError({ctx.cfg.source.string() + ": command '" + command + "' needs a sets section"});
    }
    return *ctx.cfg.spec;
}

const ModelVector& need_input(const Context& ctx, const std::string& command)
{
    if (!ctx.cfg.input) {
        throw SpecError({ctx.cfg.source.string() + ": command '" + command + "' needs an input model"});
    }
    return *ctx.cfg.input;
}

int cmd_project(Context& ctx)
{
    const auto t0 = std::chrono::steady_clock::now();
    auto p = admm_project(need_input(ctx, "project"), need_spec(ctx, "project"), ctx.cfg.admm);
    emit_projection(ctx, "project", p, seconds_since(t0));
    return ok;
}

int cmd_project_datafit(Context& ctx)
{
    if (!ctx.cfg.datafit) {
        throw SpecError({ctx.cfg.source.string() + ": command 'project-datafit' needs a datafit section"});
    }
    const auto t0 = std::chrono::steady_clock::now();
    auto p = project_with_datafit(need_input(ctx, "project-datafit"), need_spec(ctx, "project-datafit"),
                                  ctx.cfg.datafit, ctx.cfg.admm);
    emit_projection(ctx, "project-datafit", p, seconds_since(t0));
    return ok;
}

int cmd_solve_spg(Context& ctx)
{
    const auto& spec = need_spec(ctx, "solve-spg");
    if (!ctx.cfg.objective) {
        throw SpecError({ctx.cfg.source.string() + ": command 'solve-spg' needs an objective section"});
    }
    const auto& obj = *ctx.cfg.objective;
    const auto m0 = obj.initial ? *obj.initial : ModelVector::zeros(spec.grid());
    if (!(m0.grid() == spec.grid())) {
        throw ShapeError("objective initial model grid differs from the spec grid");
    }
    const auto t0 = std::chrono::steady_clock::now();
    auto r = spg_minimize(make_oracle(obj), m0, spec, ctx.cfg.spg, ctx.cfg.admm);
    const double secs = seconds_since(t0);

    write_model(ctx, "m", r.m);
    std::string csv = "iteration,f,step_norm,gamma,alpha,evaluations,feasibility\n";
    for (const auto& h : r.history) {
        csv += std::to_string(h.iteration) + "," + fmt(h.f) + "," + fmt(h.step_norm) + "," + fmt(h.gamma) + ","
               + fmt(h.alpha) + "," + std::to_string(h.evaluations) + "," + fmt(h.feasibility) + "\n";
    }
    write_text(ctx.out / "spg_history.csv", csv);
    ordered_json body;
    body["status"] = to_string(r.status);
    body["f0"] = r.f0;
    body["f"] = r.history.empty() ? r.f0 : r.history.back().f;
    body["iterations"] = r.history.size();
    body["projections"] = r.projections;
    body["warnings"] = r.warnings;
    write_report(ctx, "solve-spg", body);
    ctx.log << "SPG " << to_string(r.status) << " after " << r.history.size() << " iterations (" << secs
            << " s): f " << r.f0 << " -> " << body["f"].get<double>() << "\n";
    for (const auto& w : r.warnings) {
        ctx.log << "  warning: " << w << "\n";
    }
    return ok;
}

int cmd_video(Context& ctx)
{
    if (!ctx.cfg.video) {
        throw SpecError({ctx.cfg.source.string() + ": command 'video-decompose' needs a video section"});
    }
    const auto video = read_grid(ctx.cfg.video->input);
    const auto t0 = std::chrono::steady_clock::now();
    auto d = video_decompose(video, ctx.cfg.video->options);
    const double secs = seconds_since(t0);
    write_model(ctx, "background", d.background);
    write_model(ctx, "anomaly", d.anomaly);
    write_residuals(ctx.out / "residuals.csv", d.projection.report);
    ordered_json body;
    body["frame_means"] = d.frame_means;
    body["solve"] = report_json(d.projection.report);
    write_report(ctx, "video-decompose", body);
    summarize(ctx.log, d.projection.report, secs);
    return ok;
}

double uniform01(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int cmd_sample(Context& ctx)
{
    const auto& spec = need_spec(ctx, "sample");
    std::mt19937_64 rng(ctx.cfg.seed);
    Vector seed(spec.grid().size());
    for (auto& s : seed) {
        s = ctx.cfg.sample.low + (ctx.cfg.sample.high - ctx.cfg.sample.low) * uniform01(rng);
    }
    const auto t0 = std::chrono::steady_clock::now();
    ModelVector seed_vector(spec.grid(), std::move(seed));
    auto p = sample_element(spec, seed_vector, ctx.cfg.admm);
    write_model(ctx, "seed", seed_vector);
    emit_projection(ctx, "sample", p, seconds_since(t0));
    return ok;
}

int cmd_check(Context& ctx)
{
    if (ctx.cfg.spec) {
        const auto& s = *ctx.cfg.spec;
        ctx.log << "ok: grid " << s.grid().describe() << "; p = " << s.p() << ", q = " << s.q() << ", r = " << s.r()
                << ", s = " << s.s() << "; " << (s.all_convex() ? "all sets convex" : "contains non-convex sets")
                << "\n";
        for (const auto* d : s.ordered()) {
            ctx.log << "  " << to_string(d->target) << " '" << d->label << "': " << d->set.kind_name() << " on "
                    << d->transform.describe() << "\n";
        }
    } else {
        ctx.log << "ok: config parsed (no sets section)\n";
    }
    return ok;
}

ordered_json support_json(const std::vector<std::uint8_t>& support)
{
    auto idx = ordered_json::array();
    for (std::size_t i = 0; i < support.size(); ++i) {
        if (support[i]) {
            idx.push_back(i);
        }
    }
    return idx;
}

int cmd_generate(Context& ctx)
{
    if (!ctx.cfg.generate) {
        throw SpecError({ctx.cfg.source.string() + ": command 'generate' needs a generate section"});
    }
    const auto& gen = *ctx.cfg.generate;
    ordered_json truth;
    truth["seed"] = ctx.cfg.seed;
    if (const auto* b = std::get_if<BlockyParams>(&gen.params)) {
        auto s = blocky_anomaly_2d(*b, ctx.cfg.seed);
        write_model(ctx, "model", s.model);
        write_model(ctx, "anomaly", s.anomaly);
        truth["kind"] = "blocky-anomaly-2d";
        truth["background"] = b->background;
        truth["anomaly_value"] = s.value;
        truth["rectangle"] = {{"z0", s.z0}, {"z1", s.z1}, {"x0", s.x0}, {"x1", s.x1}};
        truth["support"] = support_json(s.support);
        if (gen.mask_fraction) {
            const auto mask = random_mask(s.model.size(), *gen.mask_fraction, ctx.cfg.seed + 1);
            write_sparse(ctx.out / "mask.txt", mask);
            write_grid(ctx.out / "data.gmsk", ModelVector(ModelGrid({mask.rows(), 1}), mask.matvec(s.model.span())));
            truth["mask_fraction"] = *gen.mask_fraction;
        }
    } else {
        const auto& p = std::get<VideoParams>(gen.params);
        auto s = lowrank_sparse_video(p, ctx.cfg.seed);
        write_model(ctx, "video", s.video);
        write_model(ctx, "background", s.background);
        write_model(ctx, "anomaly", s.anomaly);
        truth["kind"] = "lowrank-sparse-video";
        truth["rank"] = p.rank;
        truth["training_frames"] = p.training_frames;
        truth["persons"] = p.persons;
        truth["support"] = support_json(s.support);
    }
    write_text(ctx.out / "truth.json", truth.dump(2) + "\n");
    ctx.log << "wrote synthetic " << truth["kind"].get<std::string>() << " to " << ctx.out.string() << "\n";
    return ok;
}

void apply_overrides(const Flags& f, RunConfig& cfg, const std::string& command)
{
    if (f.seed) {
        cfg.seed = *f.seed;
    }
    if (f.threads) {
        cfg.threads = *f.threads;
    }
    cfg.admm.threads = cfg.threads;
    if (cfg.video) {
        cfg.video->options.admm.threads = cfg.threads;
    }
    if (f.max_iters) {
        if (command == "solve-spg") {
            cfg.spg.max_iters = *f.max_iters;
        } else {
            cfg.admm.max_iters = *f.max_iters;
            if (cfg.video) {
                cfg.video->options.admm.max_iters = *f.max_iters;
            }
        }
    }
    if (f.tol) {
        cfg.admm.eps_primal = cfg.admm.eps_dual = *f.tol;
        if (cfg.video) {
            cfg.video->options.admm.eps_primal = cfg.video->options.admm.eps_dual = *f.tol;
        }
    }
    if (f.pgm) {
        cfg.pgm = true;
    }
    check_options(cfg.admm);
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Projection onto generalized Minkowski sets", "minkproj"};
    app.require_subcommand(1);
    Flags flags;

    using Handler = int (*)(Context&);
    const std::vector<std::tuple<std::string, std::string, Handler>> commands = {
        {"project", "project the input model onto the constraint set", cmd_project},
        {"project-datafit", "project with an additional data-fit constraint", cmd_project_datafit},
        {"solve-spg", "minimize the configured objective over the set with SPG", cmd_solve_spg},
        {"video-decompose", "split a video into background and anomaly", cmd_video},
        {"sample", "project a random seed vector onto the set", cmd_sample},
        {"check", "validate the config and print the constraint layout", cmd_check},
        {"generate", "write synthetic test data with ground truth", cmd_generate},
    };
    for (const auto& [name, help, handler] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", flags.config, "JSON config file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out-dir", flags.out_dir, "output directory (created if missing)");
        sub->add_option("--seed", flags.seed, "seed for random draws, overrides the config");
        sub->add_option("--max-iters", flags.max_iters, "iteration cap of the outer solver");
        sub->add_option("--tol", flags.tol, "ADMM primal and dual tolerance");
        sub->add_option("--threads", flags.threads, "worker threads, 0 = hardware concurrency");
        sub->add_flag("--pgm", flags.pgm, "also write PGM images per 2D slice");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : usage;
    }

    std::string command;
    Handler handler = nullptr;
    for (const auto& [name, help, h] : commands) {
        if (app.got_subcommand(name)) {
            command = name;
            handler = h;
        }
    }

    try {
        auto cfg = load_config(flags.config);
        apply_overrides(flags, cfg, command);
        fs::create_directories(flags.out_dir);
        Context ctx{flags, std::move(cfg), fs::path(flags.out_dir), out};
        return handler(ctx);
    } catch (const SpecError& e) {
        err << "error: invalid specification\n";
        for (const auto& issue : e.issues()) {
            err << "  " << issue << "\n";
        }
        return invalid_spec;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return io_error;
    } catch (const SolverError& e) {
        err << "solver error: " << e.what() << "\n";
        return solver_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return failure;
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

} // namespace minkproj::cli
