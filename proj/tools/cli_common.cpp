// cli_common.cpp
#include "cli_common.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <numeric>
#include <random>

#include "more/errors.hpp"
#include "more/io.hpp"
#include "more/seeding.hpp"
#include "more/version.hpp"

namespace morecli {

std::uint64_t fnv1a_digest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw more::DataError("cannot open " + path.string() + " for digest");
    std::uint64_t hash = 14695981039346656037ull;
    char buffer[65536];
    while (in.read(buffer, sizeof(buffer)) || in.gcount() > 0) {
        const auto got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            hash ^= static_cast<unsigned char>(buffer[i]);
            hash *= 1099511628211ull;
        }
        if (!in) break;
    }
    return hash;
}

std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

nlohmann::json load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw more::DataError("cannot open config file " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& ex) {
        throw more::FormatError(path.string() + ": config parse error: " + ex.what());
    }
}

ManifestBuilder::ManifestBuilder(const std::string& command) {
    manifest_["command"] = command;
    manifest_["tool_version"] = more::kVersion;
    manifest_["timestamp"] = timestamp_utc();
    manifest_["inputs"] = nlohmann::json::object();
    manifest_["outputs"] = nlohmann::json::object();
}

void ManifestBuilder::set_config(const nlohmann::json& config) { manifest_["config"] = config; }

void ManifestBuilder::add_input(const std::string& name, const std::filesystem::path& path) {
    manifest_["inputs"][name] = {{"path", path.string()}, {"fnv1a64", hex64(fnv1a_digest(path))}};
}

void ManifestBuilder::add_output(const std::string& name, const std::filesystem::path& path) {
    manifest_["outputs"][name] = {{"path", path.string()}, {"fnv1a64", hex64(fnv1a_digest(path))}};
}

void ManifestBuilder::add_note(const std::string& key, const nlohmann::json& value) {
    manifest_[key] = value;
}

void ManifestBuilder::write(const std::filesystem::path& path) const {
    write_text_file(path, manifest_.dump(2) + "\n");
}

more::Dataset load_dataset(const std::filesystem::path& x_path,
                           const std::filesystem::path& y_path, bool header) {
    more::Dataset data;
    auto lx = more::load_matrix(x_path, more::matrix_format_for(x_path), header);
    data.x = std::move(lx.values);
    data.ids = std::move(lx.ids);
    if (!y_path.empty()) {
        auto ly = more::load_matrix(y_path, more::matrix_format_for(y_path), header);
        data.y = std::move(ly.values);
        if (data.ids.empty()) data.ids = std::move(ly.ids);
    }
    data.validate();
    return data;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw more::DataError("cannot open " + path.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw more::DataError("write failed for " + path.string());
}

void holdout_split(Eigen::Index n, double test_fraction, std::uint64_t seed,
                   std::vector<Eigen::Index>& train, std::vector<Eigen::Index>& test) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw more::ArgumentError("holdout fraction must be in (0, 1)");
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    std::mt19937_64 rng(more::derive_seed(seed, 0x686f6c64));
    for (std::size_t i = perm.size() - 1; i > 0; --i) {
        const auto j = static_cast<std::size_t>(rng() % (i + 1));
        std::swap(perm[i], perm[j]);
    }
    auto n_test = static_cast<Eigen::Index>(
        std::llround(test_fraction * static_cast<double>(n)));
    n_test = std::max<Eigen::Index>(1, std::min(n_test, n - 1));
    test.assign(perm.begin(), perm.begin() + n_test);
    train.assign(perm.begin() + n_test, perm.end());
    std::sort(test.begin(), test.end());
    std::sort(train.begin(), train.end());
}

}  // namespace morecli
