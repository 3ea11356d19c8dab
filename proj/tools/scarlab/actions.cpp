#include "actions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "scarlab/io.hpp"
#include "scarlab/subspectrum.hpp"

using nlohmann::json;

namespace scarlab::cli {

namespace {

std::string input_name(const std::string& path) {
    const std::size_t slash = path.find_last_of('/');
    return slash == std::string::npos ? path : path.substr(slash + 1);
}

std::string delta3_csv(const Delta3Curve& curve) {
    std::string out = "# scarlab delta3 v1\nL,delta3,windows\n";
    for (std::size_t i = 0; i < curve.l_values.size(); ++i)
        out += io::format_double(curve.l_values[i]) + "," + io::format_double(curve.delta3[i]) +
               "," + std::to_string(curve.window_counts[i]) + "\n";
    return out;
}

std::string histogram_csv(const SpacingHistogram& hist, bool have_q, double q) {
    std::string out = "# scarlab spacing-hist v1\nbin_lo,bin_hi,density,berry_robnik\n";
    for (std::size_t i = 0; i < hist.density.size(); ++i) {
        const double mid = 0.5 * (hist.edges[i] + hist.edges[i + 1]);
        out += io::format_double(hist.edges[i]) + "," + io::format_double(hist.edges[i + 1]) +
               "," + io::format_double(hist.density[i]) + "," +
               io::format_double(have_q ? berry_robnik_pdf(q, mid) : std::nan("")) + "\n";
    }
    return out;
}

json estimate_json(const MixingResult& r) {
    return {{"value", r.estimate},
            {"residual", r.residual},
            {"ensemble", ensemble_name(r.ensemble)},
            {"detail", r.detail}};
}

struct InputResult {
    json run;     // per-input entry for the report
    json errors;  // estimator name -> message
    int worst = 0;
    bool ok_q = false, ok_big_q = false, ok_alpha = false;
    double q = 0.0, big_q = 0.0, alpha = 0.0;
};

/// All three estimators for one spectrum; failures are captured per estimator
/// and the rest still run.  Curve CSVs are emitted only when curves_dir is
/// non-empty (the single-input mode).
InputResult analyze_spectrum(const Context& ctx, const std::string& path,
                             EnsembleKind chaotic, const std::string& curves_dir,
                             Manifest& man) {
    const RunConfig& rc = ctx.config;
    InputResult res;
    res.run["input"] = input_name(path);
    res.errors = json::object();

    auto capture = [&res](const char* name, const Error& e) {
        res.errors[name] = std::string(e.what());
        res.worst = std::max(res.worst, exit_status_for(e.code()));
    };

    Spectrum sp = io::read_spectrum(path);  // unreadable input is a hard error
    res.run["count"] = sp.energies.size();
    res.run["source"] = sp.source;

    std::vector<double> gaps;
    try {
        require(sp.energies.size() >= 500, ErrorCode::SpectrumTooShort,
                "need at least 500 levels for stable estimates, have " +
                    std::to_string(sp.energies.size()));
        if (sp.energies.size() < 2000)
            std::fprintf(stderr, "warning: %zu levels; estimates are noisy below 2000\n",
                         sp.energies.size());
        const UnfoldMethod method = rc.stats.method_for(sp.source, rc.potential.n);
        const UnfoldedSpectrum unfolded = unfold(sp, method);
        res.run["unfold"] = {{"method", unfolded.method},
                             {"mean_spacing", unfolded.mean_spacing},
                             {"window", {unfolded.window_lo, unfolded.window_hi}}};
        gaps = spacings(unfolded);

        try {
            const MixingResult q = fit_q(gaps);
            res.run["estimates"]["q"] = estimate_json(q);
            res.ok_q = true;
            res.q = q.estimate;
        } catch (const Error& e) {
            capture("q", e);
        }

        try {
            std::vector<double> ls;
            for (double l = 1.0; l <= rc.stats.l_max + 1e-9; l += 0.5) ls.push_back(l);
            const Delta3Curve curve = delta3(unfolded, ls);
            if (!curves_dir.empty()) {
                write_text(path_join(curves_dir, "delta3.csv"), delta3_csv(curve));
                man.add_output("delta3.csv");
            }
            const MixingResult big_q = fit_Q(curve, chaotic);
            res.run["estimates"]["Q"] = estimate_json(big_q);
            res.ok_big_q = true;
            res.big_q = big_q.estimate;
        } catch (const Error& e) {
            capture("Q", e);
        }

        try {
            const MixingResult alpha = dfa_alpha(gaps);
            res.run["estimates"]["alpha"] = estimate_json(alpha);
            res.ok_alpha = true;
            res.alpha = alpha.estimate;
        } catch (const Error& e) {
            capture("alpha", e);
        }

        if (!curves_dir.empty()) {
            try {
                const SpacingHistogram hist = nnls_histogram(gaps, rc.stats.bins);
                write_text(path_join(curves_dir, "spacing_hist.csv"),
                           histogram_csv(hist, res.ok_q, res.q));
                man.add_output("spacing_hist.csv");
            } catch (const Error& e) {
                capture("histogram", e);
            }
        }
    } catch (const Error& e) {
        capture("unfold", e);  // everything downstream needs the unfolded levels
    }
    return res;
}

json mean_sd(const std::vector<double>& values) {
    double avg = 0.0;
    for (double v : values) avg += v;
    avg /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - avg) * (v - avg);
    const double sd =
        values.size() > 1 ? std::sqrt(var / static_cast<double>(values.size() - 1)) : 0.0;
    return {{"avg", avg}, {"sd", sd}, {"count", values.size()}};
}

}  // namespace

void run_solve(const Context& ctx, const std::string& out_dir, Manifest& man) {
    const RunConfig& rc = ctx.config;
    require(!rc.field.sweep, ErrorCode::ConfigError,
            "solve needs a scalar field; field sweeps belong to the sweep command");
    rc.potential.validate();
    const Grid2D grid = rc.solver.make_grid();
    const PotentialGrid pot = build_potential_grid(rc.potential, grid);
    const EigenSet set = solve_itp(pot, rc.field.b, rc.solver.solver());

    io::write_eigenset(path_join(out_dir, "eigenstates.qscr"), set);
    man.add_output("eigenstates.qscr");

    Spectrum sp;
    sp.energies = set.energies;
    sp.source = "solve:" + ctx.config_hash;
    io::write_spectrum(path_join(out_dir, "spectrum.csv"), sp);
    man.add_output("spectrum.csv");

    io::write_potential_csv(path_join(out_dir, "potential.csv"), pot);
    man.add_output("potential.csv");
}

int run_stats(const Context& ctx, const std::vector<std::string>& inputs,
              const std::string& out_dir, Manifest& man) {
    const RunConfig& rc = ctx.config;
    require(!inputs.empty(), ErrorCode::ConfigError, "stats needs at least one spectrum file");
    require(!rc.field.sweep, ErrorCode::ConfigError,
            "stats needs a scalar field to pick the reference ensemble");
    const EnsembleKind chaotic = rc.stats.resolve(rc.field.b);
    const bool single = inputs.size() == 1;

    json report;
    report["schema"] = "scarlab-stats-report-v1";
    report["ensemble"] = ensemble_name(chaotic);

    int worst = 0;
    json errors = json::object();
    std::vector<double> all_q, all_big_q, all_alpha;
    json runs = json::array();
    for (const std::string& path : inputs) {
        InputResult res = analyze_spectrum(ctx, path, chaotic, single ? out_dir : "", man);
        if (!res.errors.empty()) errors[input_name(path)] = res.errors;
        worst = std::max(worst, res.worst);
        man.add_job("stats:" + input_name(path), res.worst);
        if (res.ok_q) all_q.push_back(res.q);
        if (res.ok_big_q) all_big_q.push_back(res.big_q);
        if (res.ok_alpha) all_alpha.push_back(res.alpha);
        runs.push_back(std::move(res.run));
    }
    report["errors"] = errors;

    if (single) {
        report.update(runs.front());  // count, source, unfold, estimates
    } else {
        report["inputs"] = json::array();
        for (const std::string& path : inputs) report["inputs"].push_back(input_name(path));
        report["runs"] = runs;
        json summary = json::object();
        if (!all_q.empty()) summary["q"] = mean_sd(all_q);
        if (!all_big_q.empty()) summary["Q"] = mean_sd(all_big_q);
        if (!all_alpha.empty()) summary["alpha"] = mean_sd(all_alpha);
        report["summary"] = summary;
    }

    write_text(path_join(out_dir, "report.json"), report.dump(2) + "\n");
    man.add_output("report.json");
    return worst != 0 ? 1 : 0;
}

void run_subspec(const Context& ctx, const std::string& container_path,
                 const std::string& out_dir, Manifest& man) {
    const RunConfig& rc = ctx.config;
    const EigenSet set = io::read_eigenset(container_path);
    const int idx = rc.subspec.state;
    require(idx < static_cast<int>(set.states.size()), ErrorCode::ConfigError,
            "state index " + std::to_string(idx) + " out of range; container has " +
                std::to_string(set.states.size()) + " states");

    const double e_center = set.energies[idx];
    const std::vector<BasisState> basis =
        build_unperturbed_basis(rc.potential, set.grid, set.b_field, e_center, rc.subspec.window,
                                rc.subspec.resonances, rc.subspec.k_max, rc.solver.solver());
    Subspectrum sub = overlaps(set.states[idx], set.grid, basis, rc.solver.tol);
    sub.state_index = idx;

    std::string csv = "# scarlab subspectrum v1\nm,n_r,l,E_m,weight\n";
    for (const WeightEntry& w : sub.weights)
        csv += std::to_string(w.m) + "," + std::to_string(w.label.n_r) + "," +
               std::to_string(w.label.l) + "," + io::format_double(w.energy) + "," +
               io::format_double(w.weight) + "\n";
    write_text(path_join(out_dir, "subspectrum.csv"), csv);
    man.add_output("subspectrum.csv");

    json report;
    report["schema"] = "scarlab-subspec-report-v1";
    report["state_index"] = idx;
    report["energy"] = e_center;
    report["basis_size"] = basis.size();
    report["completeness"] = sub.completeness;
    report["complete"] = sub.complete();
    if (sub.complete()) {
        const auto [best, set_weight] = best_resonant_set(sub, rc.subspec.resonances,
                                                          rc.subspec.k_max);
        const ScarStrength strength = scar_strength(sub, best);
        json members = json::array();
        for (const FDLabel& label : best.members) {
            double weight = 0.0;
            for (const WeightEntry& w : sub.weights)
                if (w.label == label) {
                    weight = w.weight;
                    break;
                }
            members.push_back({{"n_r", label.n_r}, {"l", label.l}, {"weight", weight}});
        }
        report["best_set"] = {
            {"anchor", {{"n_r", best.anchor.n_r}, {"l", best.anchor.l}}},
            {"resonance", {{"v_theta", best.resonance.v_theta}, {"v_r", best.resonance.v_r}}},
            {"members", members},
            {"set_weight", set_weight}};
        report["participation"] = strength.participation;
    } else {
        std::fprintf(stderr,
                     "warning: expansion completeness %.4f is below 0.99; "
                     "scar metrics skipped\n",
                     sub.completeness);
        report["warning"] = "completeness below 0.99; scar metrics skipped";
    }
    write_text(path_join(out_dir, "subspec.json"), report.dump(2) + "\n");
    man.add_output("subspec.json");

    const std::string image = "state_" + std::to_string(idx) + ".pgm";
    io::write_density_pgm(path_join(out_dir, image), set.grid, set.states[idx]);
    man.add_output(image);
}

void run_dos(const Context& ctx, const std::string& out_dir, Manifest& man) {
    const RunConfig& rc = ctx.config;
    require(rc.potential.n == 2.0, ErrorCode::UnsupportedPotential,
            "the level map is defined for the harmonic well (n = 2) only");
    const DOSMap map = dos_map(rc.potential.omega0, rc.dos.axes);
    io::write_dos_csv(path_join(out_dir, "dos.csv"), map);
    man.add_output("dos.csv");
    io::write_dos_matrix(path_join(out_dir, "dos.bin"), map);
    man.add_output("dos.bin");
}

void run_synth(const Context& ctx, const std::string& kind, std::size_t count,
               std::uint64_t seed, const std::string& out_dir, Manifest& man) {
    (void)ctx;
    EnsembleKind ensemble;
    if (kind == "poisson")
        ensemble = EnsembleKind::Poisson;
    else if (kind == "goe")
        ensemble = EnsembleKind::GOE;
    else if (kind == "gue")
        ensemble = EnsembleKind::GUE;
    else
        fail(ErrorCode::ConfigError, "kind must be poisson, goe, or gue, not '" + kind + "'");
    Spectrum sp = synth_spectrum(ensemble, count, seed);
    sp.source = "synthetic:" + kind + ":" + std::to_string(seed);
    io::write_spectrum(path_join(out_dir, "spectrum.csv"), sp);
    man.add_output("spectrum.csv");
}

}  // namespace scarlab::cli
