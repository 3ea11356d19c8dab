#include <cerrno>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <map>

#include <fcntl.h>
#include <spawn.h>
#include <sys/wait.h>

#include <json.hpp>

#include "actions.hpp"
#include "scarlab/io.hpp"

extern char** environ;

namespace scarlab::cli {

namespace {

struct JobSpec {
    double m = 0.0, sigma = 0.0, b = 0.0;
    std::uint64_t seed = 0;
    std::string tag;
    std::string dir;  // relative to the sweep output dir
    int exit_code = -1;
};

std::string job_tag(const JobSpec& j) {
    return "M" + io::format_double(j.m) + "_sigma" + io::format_double(j.sigma) + "_B" +
           io::format_double(j.b) + "_seed" + std::to_string(j.seed);
}

/// Standalone config for one tuple; parsing it back reproduces the parent
/// settings with the tuple substituted, so a job is rerunnable by hand.
std::string job_config_text(const RunConfig& rc, const JobSpec& j) {
    auto f = io::format_double;
    std::string t = "# sweep job " + j.tag + "\n\n";
    t += "[potential]\nn = " + f(rc.potential.n) + "\nomega0 = " + f(rc.potential.omega0) + "\n\n";
    t += "[bumps]\nM = " + f(j.m) + "\nsigma = " + f(j.sigma) + "\ndensity = " +
         f(rc.potential.density) + "\nseed = " + std::to_string(j.seed) + "\n\n";
    t += "[field]\nB = " + f(j.b) + "\n\n";
    t += "[solver]\ngrid = " + std::to_string(rc.solver.grid) + "\nextent = " +
         f(rc.solver.extent) + "\nnum_states = " + std::to_string(rc.solver.num_states) +
         "\ntol = " + f(rc.solver.tol) + "\nmax_iters = " + std::to_string(rc.solver.max_iters) +
         "\nseed = " + std::to_string(rc.solver.seed) + "\ndtau_start = " + f(rc.solver.dtau_start) +
         "\ndtau_min = " + f(rc.solver.dtau_min) + "\nextra_states = " +
         std::to_string(rc.solver.extra_states) + "\n\n";
    t += "[stats]\nensemble = \"" + rc.stats.ensemble + "\"\nL_max = " + f(rc.stats.l_max) +
         "\nbins = " + std::to_string(rc.stats.bins) + "\nunfold = \"" + rc.stats.unfold + "\"\n";
    return t;
}

int spawn_worker(const Context& ctx, const std::string& config_path, const std::string& job_dir,
                 const std::string& log_path, pid_t* pid) {
    posix_spawn_file_actions_t fa;
    posix_spawn_file_actions_init(&fa);
    posix_spawn_file_actions_addopen(&fa, 1, log_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    posix_spawn_file_actions_adddup2(&fa, 1, 2);
    std::vector<std::string> args = {ctx.self_path, "run-job",  "--config", config_path,
                                     "--out-dir",  job_dir};
    std::vector<char*> argv;
    argv.reserve(args.size() + 1);
    for (std::string& a : args) argv.push_back(a.data());
    argv.push_back(nullptr);
    const int rc = posix_spawn(pid, ctx.self_path.c_str(), &fa, nullptr, argv.data(), environ);
    posix_spawn_file_actions_destroy(&fa);
    return rc;
}

int severity(int exit_code) {
    if (exit_code == 0) return 0;
    return exit_code == 1 ? 1 : 2;
}

}  // namespace

int run_sweep(const Context& ctx, Manifest& man) {
    const RunConfig& rc = ctx.config;
    const std::vector<double> b_values = rc.field.values();
    const std::vector<std::uint64_t> seeds =
        ctx.has_seed_override ? std::vector<std::uint64_t>{ctx.seed_override} : rc.sweep.seeds;
    man.seeds = seeds;

    std::vector<JobSpec> jobs;
    for (double m : rc.sweep.m_values)
        for (double sigma : rc.sweep.sigma_values)
            for (double b : b_values)
                for (std::uint64_t seed : seeds) {
                    JobSpec j{m, sigma, b, seed};
                    j.tag = job_tag(j);
                    j.dir = "jobs/" + j.tag;
                    jobs.push_back(j);
                }
    require(!jobs.empty(), ErrorCode::ConfigError, "sweep has no parameter tuples");

    for (const JobSpec& j : jobs) {
        ensure_dir(path_join(ctx.out_dir, j.dir));
        write_text(path_join(ctx.out_dir, j.dir + "/config.ini"), job_config_text(rc, j));
    }

    // Worker pool: one isolated process per tuple, results collected from files.
    const int width = std::min<int>(ctx.effective_workers(), static_cast<int>(jobs.size()));
    std::map<pid_t, std::size_t> active;
    std::size_t next = 0;
    auto launch_until_full = [&] {
        while (static_cast<int>(active.size()) < width && next < jobs.size()) {
            JobSpec& j = jobs[next];
            pid_t pid = -1;
            const int rc_spawn =
                spawn_worker(ctx, path_join(ctx.out_dir, j.dir + "/config.ini"),
                             path_join(ctx.out_dir, j.dir),
                             path_join(ctx.out_dir, j.dir + "/log.txt"), &pid);
            if (rc_spawn != 0) {
                j.exit_code = 2;
                std::fprintf(stderr, "error: cannot start worker for %s: %s\n", j.tag.c_str(),
                             std::strerror(rc_spawn));
            } else {
                active[pid] = next;
            }
            ++next;
        }
    };
    launch_until_full();
    while (!active.empty()) {
        int status = 0;
        const pid_t pid = waitpid(-1, &status, 0);
        if (pid < 0) {
            if (errno == EINTR) continue;
            fail(ErrorCode::IoError, std::string("waitpid: ") + std::strerror(errno));
        }
        const auto it = active.find(pid);
        if (it == active.end()) continue;
        JobSpec& j = jobs[it->second];
        if (WIFEXITED(status))
            j.exit_code = WEXITSTATUS(status);
        else if (WIFSIGNALED(status))
            j.exit_code = 128 + WTERMSIG(status);
        else
            j.exit_code = 2;
        std::fprintf(stderr, "[sweep] %s -> %s (%d)\n", j.tag.c_str(),
                     j.exit_code == 0 ? "ok" : "failed", j.exit_code);
        active.erase(it);
        launch_until_full();
    }

    // Collect per-job estimates and fold every job file into the root manifest.
    struct JobEstimates {
        bool ok = false;
        double q = 0.0, big_q = 0.0, alpha = 0.0;
    };
    std::vector<JobEstimates> estimates(jobs.size());
    int worst = 0;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        JobSpec& j = jobs[i];
        man.add_output(j.dir + "/config.ini");
        man.add_output(j.dir + "/log.txt");
        const std::string child_manifest = path_join(ctx.out_dir, j.dir + "/manifest.json");
        if (std::filesystem::exists(child_manifest)) {
            man.add_output(j.dir + "/manifest.json");
            try {
                const nlohmann::json cm = nlohmann::json::parse(read_text(child_manifest));
                for (const auto& rel : cm.at("outputs"))
                    man.add_output(j.dir + "/" + rel.get<std::string>());
            } catch (const std::exception& e) {
                std::fprintf(stderr, "warning: unreadable manifest for %s: %s\n", j.tag.c_str(),
                             e.what());
                if (j.exit_code == 0) j.exit_code = 1;
            }
        } else {
            // Crashed worker: record whatever it left behind.
            for (const std::string& rel : list_files(path_join(ctx.out_dir, j.dir)))
                man.add_output(j.dir + "/" + rel);
        }
        if (j.exit_code == 0) {
            try {
                const nlohmann::json report =
                    nlohmann::json::parse(read_text(path_join(ctx.out_dir, j.dir + "/report.json")));
                const nlohmann::json& est = report.at("estimates");
                estimates[i].q = est.at("q").at("value").get<double>();
                estimates[i].big_q = est.at("Q").at("value").get<double>();
                estimates[i].alpha = est.at("alpha").at("value").get<double>();
                estimates[i].ok = true;
            } catch (const std::exception& e) {
                std::fprintf(stderr, "warning: unreadable report for %s: %s\n", j.tag.c_str(),
                             e.what());
                j.exit_code = 1;
            }
        }
        man.add_job(j.tag, j.exit_code);
        worst = std::max(worst, severity(j.exit_code));
    }

    // One aggregated row per (M, sigma, B), averaged over the seeds that
    // completed; tuples with no surviving job are skipped.
    std::string csv = "# scarlab sweep v1\nM,sigma,B,q,Q,alpha\n";
    std::size_t index = 0;
    for (double m : rc.sweep.m_values)
        for (double sigma : rc.sweep.sigma_values)
            for (double b : b_values) {
                double sum_q = 0.0, sum_big_q = 0.0, sum_alpha = 0.0;
                int count = 0;
                for (std::size_t s = 0; s < seeds.size(); ++s, ++index) {
                    if (!estimates[index].ok) continue;
                    sum_q += estimates[index].q;
                    sum_big_q += estimates[index].big_q;
                    sum_alpha += estimates[index].alpha;
                    ++count;
                }
                if (count == 0) continue;
                csv += io::format_double(m) + "," + io::format_double(sigma) + "," +
                       io::format_double(b) + "," + io::format_double(sum_q / count) + "," +
                       io::format_double(sum_big_q / count) + "," +
                       io::format_double(sum_alpha / count) + "\n";
            }
    write_text(path_join(ctx.out_dir, "sweep.csv"), csv);
    man.add_output("sweep.csv");
    return worst;
}

}  // namespace scarlab::cli
