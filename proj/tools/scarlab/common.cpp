#include "common.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "scarlab/error.hpp"
#include "scarlab/io.hpp"

namespace fs = std::filesystem;

namespace scarlab::cli {

void Context::load_config() {
    require(!config_path.empty(), ErrorCode::ConfigError, "missing --config");
    config = RunConfig::from_file(config_path);
    std::string hash_input = config.text;
    if (has_seed_override) {
        config.potential.seed = seed_override;
        hash_input += "\n# seed-override=" + std::to_string(seed_override) + "\n";
    }
    config_hash = io::hex64(io::fnv1a64(hash_input));
}

int Context::effective_workers() const {
    if (workers > 0) return workers;
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

void Manifest::write(const std::string& out_dir) const {
    nlohmann::json j;
    j["schema"] = "scarlab-manifest-v1";
    j["code_version"] = kCodeVersion;
    j["command"] = command;
    j["config_hash"] = config_hash;
    j["seeds"] = seeds;
    j["jobs"] = nlohmann::json::array();
    for (const Job& job : jobs)
        j["jobs"].push_back({{"name", job.name}, {"status", job.status}, {"exit", job.exit_code}});
    std::vector<std::string> sorted = outputs;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    j["outputs"] = sorted;
    write_text(path_join(out_dir, "manifest.json"), j.dump(2) + "\n");
}

void ensure_dir(const std::string& path) {
    std::error_code ec;
    fs::create_directories(path, ec);
    require(!ec, ErrorCode::IoError, "cannot create directory " + path + ": " + ec.message());
}

std::string path_join(const std::string& dir, const std::string& leaf) {
    if (dir.empty()) return leaf;
    return dir.back() == '/' ? dir + leaf : dir + "/" + leaf;
}

void write_text(const std::string& path, const std::string& text) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    require(f != nullptr, ErrorCode::IoError, "cannot open " + path + " for writing");
    const bool ok = std::fwrite(text.data(), 1, text.size(), f) == text.size() &&
                    std::fflush(f) == 0 && std::ferror(f) == 0;
    std::fclose(f);
    require(ok, ErrorCode::IoError, "short write to " + path);
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), ErrorCode::IoError, "cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::string> list_files(const std::string& dir) {
    std::vector<std::string> out;
    std::error_code ec;
    for (fs::recursive_directory_iterator it(dir, ec), end; !ec && it != end; it.increment(ec)) {
        if (it->is_regular_file(ec))
            out.push_back(fs::relative(it->path(), dir).generic_string());
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace scarlab::cli
