#include <cstdio>
#include <string>
#include <vector>

#include <unistd.h>

#include <CLI11.hpp>

#include "actions.hpp"
#include "scarlab/error.hpp"
#include "scarlab/io.hpp"

using namespace scarlab;
using namespace scarlab::cli;

namespace {

std::string self_exe(const char* argv0) {
    char buf[4096];
    const ssize_t n = readlink("/proc/self/exe", buf, sizeof buf - 1);
    if (n > 0) {
        buf[n] = '\0';
        return buf;
    }
    return argv0;
}

template <class F>
int guarded(F&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_status_for(e.code());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"disordered quantum well spectra: solvers, level statistics, and scar analysis"};
    app.require_subcommand(1);

    Context ctx;
    ctx.self_path = self_exe(argv[0]);

    auto add_common = [&ctx](CLI::App* sub, bool with_config) {
        if (with_config)
            sub->add_option("--config", ctx.config_path, "run configuration file")->required();
        sub->add_option("--out-dir", ctx.out_dir, "output directory (created if missing)")
            ->required();
        sub->add_option("--workers", ctx.workers, "concurrent worker processes");
        sub->add_option_function<std::uint64_t>(
            "--seed-override",
            [&ctx](std::uint64_t v) {
                ctx.seed_override = v;
                ctx.has_seed_override = true;
            },
            "replace the configured disorder seed(s)");
    };

    CLI::App* solve = app.add_subcommand("solve", "relax the configured well to its lowest states");
    add_common(solve, true);

    CLI::App* stats = app.add_subcommand("stats", "chaoticity estimators (q, Q, alpha)");
    add_common(stats, true);
    std::vector<std::string> stat_inputs;
    stats->add_option("inputs", stat_inputs, "spectrum CSV files")->required()->expected(-1);

    CLI::App* sweep = app.add_subcommand("sweep", "grid of (M, sigma, B) jobs in worker processes");
    add_common(sweep, true);

    CLI::App* subspec =
        app.add_subcommand("subspec", "expand a stored eigenstate over the clean-well basis");
    add_common(subspec, true);
    std::string container;
    subspec->add_option("container", container, "eigenstate container")->required();

    CLI::App* dos = app.add_subcommand("dos", "harmonic-well level density over (B, E)");
    add_common(dos, true);

    CLI::App* synth = app.add_subcommand("synth", "synthetic reference spectrum");
    add_common(synth, false);
    std::string kind = "goe";
    std::size_t count = 4000;
    std::uint64_t synth_seed = 1;
    synth->add_option("--kind", kind, "poisson | goe | gue");
    synth->add_option("--count", count, "number of levels");
    synth->add_option("--seed", synth_seed, "generator seed");

    CLI::App* run_job = app.add_subcommand("run-job", "sweep worker (internal)");
    run_job->group("");  // not shown in help
    add_common(run_job, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (app.got_subcommand(solve)) {
        return guarded([&] {
            ctx.load_config();
            ensure_dir(ctx.out_dir);
            Manifest man;
            man.command = "solve";
            man.config_hash = ctx.config_hash;
            man.seeds = {ctx.config.potential.seed, ctx.config.solver.seed};
            run_solve(ctx, ctx.out_dir, man);
            man.add_job("solve", 0);
            man.write(ctx.out_dir);
            return 0;
        });
    }
    if (app.got_subcommand(stats)) {
        return guarded([&] {
            ctx.load_config();
            ensure_dir(ctx.out_dir);
            Manifest man;
            man.command = "stats";
            man.config_hash = ctx.config_hash;
            const int status = run_stats(ctx, stat_inputs, ctx.out_dir, man);
            man.write(ctx.out_dir);
            return status;
        });
    }
    if (app.got_subcommand(sweep)) {
        return guarded([&] {
            ctx.load_config();
            ensure_dir(ctx.out_dir);
            Manifest man;
            man.command = "sweep";
            man.config_hash = ctx.config_hash;
            const int status = run_sweep(ctx, man);
            man.write(ctx.out_dir);
            return status;
        });
    }
    if (app.got_subcommand(subspec)) {
        return guarded([&] {
            ctx.load_config();
            ensure_dir(ctx.out_dir);
            Manifest man;
            man.command = "subspec";
            man.config_hash = ctx.config_hash;
            man.seeds = {ctx.config.solver.seed};
            run_subspec(ctx, container, ctx.out_dir, man);
            man.add_job("subspec", 0);
            man.write(ctx.out_dir);
            return 0;
        });
    }
    if (app.got_subcommand(dos)) {
        return guarded([&] {
            ctx.load_config();
            ensure_dir(ctx.out_dir);
            Manifest man;
            man.command = "dos";
            man.config_hash = ctx.config_hash;
            run_dos(ctx, ctx.out_dir, man);
            man.add_job("dos", 0);
            man.write(ctx.out_dir);
            return 0;
        });
    }
    if (app.got_subcommand(synth)) {
        return guarded([&] {
            const std::uint64_t seed = ctx.has_seed_override ? ctx.seed_override : synth_seed;
            ensure_dir(ctx.out_dir);
            Manifest man;
            man.command = "synth";
            man.config_hash = io::hex64(io::fnv1a64("synth:" + kind + ":" + std::to_string(count) +
                                                    ":" + std::to_string(seed)));
            man.seeds = {seed};
            run_synth(ctx, kind, count, seed, ctx.out_dir, man);
            man.add_job("synth", 0);
            man.write(ctx.out_dir);
            return 0;
        });
    }
    if (app.got_subcommand(run_job)) {
        return guarded([&] {
            ctx.load_config();
            ensure_dir(ctx.out_dir);
            Manifest man;
            man.command = "run-job";
            man.config_hash = ctx.config_hash;
            man.seeds = {ctx.config.potential.seed};
            try {
                run_solve(ctx, ctx.out_dir, man);
                man.add_job("solve", 0);
            } catch (const Error& e) {
                std::fprintf(stderr, "error: %s\n", e.what());
                const int status = exit_status_for(e.code());
                man.add_job("solve", status);
                man.write(ctx.out_dir);
                return status;
            }
            int status = 0;
            try {
                status = run_stats(ctx, {path_join(ctx.out_dir, "spectrum.csv")}, ctx.out_dir, man);
            } catch (const Error& e) {
                std::fprintf(stderr, "error: %s\n", e.what());
                status = exit_status_for(e.code());
            }
            man.write(ctx.out_dir);
            return status;
        });
    }
    return 2;  // unreachable: a subcommand is required
}
