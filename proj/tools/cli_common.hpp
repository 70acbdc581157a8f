// cli_common.hpp -- shared plumbing for the command-line tool: file digests,
// run manifests, config-file merging, small I/O helpers.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "more/dataset.hpp"

namespace morecli {

/// FNV-1a 64-bit digest of a file's bytes.
std::uint64_t fnv1a_digest(const std::filesystem::path& path);
std::string hex64(std::uint64_t v);

std::string timestamp_utc();

nlohmann::json load_config_file(const std::filesystem::path& path);

/// Applies a config-file value unless the flag was given on the command
/// line (flags win). Config keys are the long flag names without dashes.
template <typename T>
void config_override(const nlohmann::json& config, const CLI::App* cmd,
                     const std::string& flag, T& value) {
    const std::string key = flag.substr(2);
    if (config.contains(key) && cmd->count(flag) == 0) value = config.at(key).get<T>();
}

/// Accumulates the run manifest: resolved config, input/output digests.
class ManifestBuilder {
  public:
    explicit ManifestBuilder(const std::string& command);
    void set_config(const nlohmann::json& config);
    void add_input(const std::string& name, const std::filesystem::path& path);
    void add_output(const std::string& name, const std::filesystem::path& path);
    void add_note(const std::string& key, const nlohmann::json& value);
    void write(const std::filesystem::path& path) const;

  private:
    nlohmann::json manifest_;
};

/// Loads x (and optionally y) into a Dataset; ids come from whichever csv
/// carries them.
more::Dataset load_dataset(const std::filesystem::path& x_path,
                           const std::filesystem::path& y_path, bool header);

void write_text_file(const std::filesystem::path& path, const std::string& content);

/// Deterministic shuffled holdout split.
void holdout_split(Eigen::Index n, double test_fraction, std::uint64_t seed,
                   std::vector<Eigen::Index>& train, std::vector<Eigen::Index>& test);

}  // namespace morecli
