#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scarlab/config.hpp"

namespace scarlab::cli {

inline constexpr const char* kCodeVersion = "scarlab 0.1.0";

/// Global flags plus the loaded configuration.
struct Context {
    std::string config_path;
    std::string out_dir;
    int workers = 0;  // 0 selects the hardware thread count
    bool has_seed_override = false;
    std::uint64_t seed_override = 0;
    std::string self_path;  // this executable, for spawning sweep workers

    RunConfig config;       // populated by load_config()
    std::string config_hash;

    void load_config();
    int effective_workers() const;
};

/// Record of one run: what produced it, with what inputs, and every file
/// written under the output directory.  Serialized as manifest.json at the
/// output root; content is fully determined by the run inputs (no clocks).
struct Manifest {
    struct Job {
        std::string name;
        std::string status;  // "ok" or "failed"
        int exit_code = 0;
    };

    std::string command;
    std::string config_hash;
    std::vector<std::uint64_t> seeds;
    std::vector<Job> jobs;
    std::vector<std::string> outputs;  // paths relative to the output dir

    void add_output(const std::string& rel_path) { outputs.push_back(rel_path); }
    void add_job(const std::string& name, int exit_code) {
        jobs.push_back({name, exit_code == 0 ? "ok" : "failed", exit_code});
    }

    /// Write <out_dir>/manifest.json (sorted keys, sorted outputs).
    void write(const std::string& out_dir) const;
};

void ensure_dir(const std::string& path);
std::string path_join(const std::string& dir, const std::string& leaf);

/// Write text to a file, failing loudly on IO errors.
void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

/// Every regular file under dir (relative paths, sorted), the crash-recovery
/// fallback for listing a worker directory without a manifest.
std::vector<std::string> list_files(const std::string& dir);

}  // namespace scarlab::cli
