// io.cpp
#include "more/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>

#include <json.hpp>

#include "more/errors.hpp"
#include "more/format.hpp"

namespace more {

namespace {

constexpr char kMagic[8] = {'M', 'O', 'R', 'E', 'M', 'A', 'T', '1'};

std::string loc(const std::filesystem::path& path) { return path.string(); }

void put_u64(std::ostream& out, std::uint64_t v) {
    char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(bytes, 8);
}

bool get_u64(std::istream& in, std::uint64_t& v) {
    unsigned char bytes[8];
    if (!in.read(reinterpret_cast<char*>(bytes), 8)) return false;
    v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    return true;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(trim(line.substr(start)));
            break;
        }
        fields.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return fields;
}

bool parse_field(std::string_view field, double& out) {
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    if (field.empty()) return false;
    const char* begin = field.data();
    const char* end = begin + field.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + loc(path));
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

LoadedMatrix load_matrix_csv(const std::filesystem::path& path, bool header) {
    const auto lines = read_lines(path);

    LoadedMatrix out;
    std::vector<std::vector<double>> rows;
    bool has_ids = false;
    bool first_data_line = true;
    bool header_pending = header;
    std::size_t fields_per_line = 0;

    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
        if (lines[ln].empty()) continue;
        if (header_pending) {
            header_pending = false;
            continue;
        }
        const auto fields = split_fields(lines[ln]);
        if (first_data_line) {
            double probe = 0.0;
            has_ids = !parse_field(fields[0], probe);
            fields_per_line = fields.size();
            if (fields.size() <= (has_ids ? 1u : 0u))
                throw FormatError(loc(path) + ": line " + std::to_string(ln + 1) +
                                  ": no numeric columns");
            first_data_line = false;
        }
        if (fields.size() != fields_per_line)
            throw FormatError(loc(path) + ": line " + std::to_string(ln + 1) + ": expected " +
                              std::to_string(fields_per_line) + " fields, got " +
                              std::to_string(fields.size()));
        std::size_t start = 0;
        if (has_ids) {
            out.ids.emplace_back(fields[0]);
            start = 1;
        }
        std::vector<double> row;
        row.reserve(fields.size() - start);
        for (std::size_t f = start; f < fields.size(); ++f) {
            double v = 0.0;
            if (!parse_field(fields[f], v))
                throw FormatError(loc(path) + ": line " + std::to_string(ln + 1) + ", column " +
                                  std::to_string(f + 1) + ": cannot parse '" +
                                  std::string(fields[f]) + "'");
            if (!std::isfinite(v))
                throw FormatError(loc(path) + ": line " + std::to_string(ln + 1) + ", column " +
                                  std::to_string(f + 1) + ": non-finite value");
            row.push_back(v);
        }
        rows.push_back(std::move(row));
    }

    if (rows.empty()) throw FormatError(loc(path) + ": empty matrix");
    out.values.resize(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            out.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    return out;
}

LoadedMatrix load_matrix_bin(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + loc(path));

    char magic[8];
    if (!in.read(magic, 8) || std::string_view(magic, 8) != std::string_view(kMagic, 8))
        throw FormatError(loc(path) + ": bad magic at offset 0");

    std::uint64_t rows = 0, cols = 0;
    if (!get_u64(in, rows) || !get_u64(in, cols))
        throw FormatError(loc(path) + ": truncated header at offset 8");
    if (rows == 0 || cols == 0) throw FormatError(loc(path) + ": empty matrix");
    if (rows > (1ull << 40) || cols > (1ull << 40) || rows > (1ull << 40) / cols)
        throw FormatError(loc(path) + ": implausible dimensions " + std::to_string(rows) + "x" +
                          std::to_string(cols));

    LoadedMatrix out;
    out.values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::uint64_t r = 0; r < rows; ++r) {
        for (std::uint64_t c = 0; c < cols; ++c) {
            std::uint64_t bits = 0;
            if (!get_u64(in, bits))
                throw FormatError(loc(path) + ": truncated payload at value index " +
                                  std::to_string(r * cols + c));
            const double v = std::bit_cast<double>(bits);
            if (!std::isfinite(v))
                throw FormatError(loc(path) + ": non-finite value at row " + std::to_string(r) +
                                  ", col " + std::to_string(c));
            out.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
        }
    }
    char extra;
    if (in.read(&extra, 1)) throw FormatError(loc(path) + ": trailing bytes after payload");
    return out;
}

Matrix load_bin_values(const std::filesystem::path& path) {
    return load_matrix_bin(path).values;
}

}  // namespace

MatrixFormat matrix_format_for(const std::filesystem::path& path) {
    return path.extension() == ".bin" ? MatrixFormat::bin : MatrixFormat::csv;
}

LoadedMatrix load_matrix(const std::filesystem::path& path, MatrixFormat format, bool header) {
    return format == MatrixFormat::bin ? load_matrix_bin(path) : load_matrix_csv(path, header);
}

void save_matrix_bin(const std::filesystem::path& path, const Eigen::Ref<const Matrix>& values) {
    if (values.size() == 0) throw ArgumentError("save_matrix_bin: empty matrix");
    check_finite(Matrix(values), "save_matrix_bin");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open " + loc(path) + " for writing");
    out.write(kMagic, 8);
    put_u64(out, static_cast<std::uint64_t>(values.rows()));
    put_u64(out, static_cast<std::uint64_t>(values.cols()));
    for (Eigen::Index r = 0; r < values.rows(); ++r)
        for (Eigen::Index c = 0; c < values.cols(); ++c)
            put_u64(out, std::bit_cast<std::uint64_t>(values(r, c)));
    out.flush();
    if (!out) throw DataError("write failed for " + loc(path));
}

void save_matrix_csv(const std::filesystem::path& path, const Eigen::Ref<const Matrix>& values,
                     const std::vector<std::string>& ids) {
    if (values.size() == 0) throw ArgumentError("save_matrix_csv: empty matrix");
    if (!ids.empty() && static_cast<Eigen::Index>(ids.size()) != values.rows())
        throw ArgumentError("save_matrix_csv: id count does not match row count");
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot open " + loc(path) + " for writing");
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
        if (!ids.empty()) out << ids[static_cast<std::size_t>(r)] << ',';
        for (Eigen::Index c = 0; c < values.cols(); ++c) {
            if (c > 0) out << ',';
            out << format_double(values(r, c));
        }
        out << '\n';
    }
    out.flush();
    if (!out) throw DataError("write failed for " + loc(path));
}

AtlasMap load_atlas(const std::filesystem::path& path) {
    const auto lines = read_lines(path);

    std::vector<std::pair<long, std::string>> pairs;
    bool first_line = true;
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
        if (lines[ln].empty()) continue;
        const bool may_be_header = first_line;
        first_line = false;
        const auto fields = split_fields(lines[ln]);
        if (fields.size() != 2)
            throw FormatError(loc(path) + ": line " + std::to_string(ln + 1) +
                              ": expected 2 fields, got " + std::to_string(fields.size()));
        long dim = 0;
        const auto f = fields[0];
        auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), dim);
        if (ec != std::errc() || ptr != f.data() + f.size()) {
            if (may_be_header) continue;
            throw FormatError(loc(path) + ": line " + std::to_string(ln + 1) +
                              ": cannot parse dimension index '" + std::string(f) + "'");
        }
        if (dim < 0)
            throw FormatError(loc(path) + ": line " + std::to_string(ln + 1) +
                              ": negative dimension index");
        if (fields[1].empty())
            throw FormatError(loc(path) + ": line " + std::to_string(ln + 1) +
                              ": empty region label");
        pairs.emplace_back(dim, std::string(fields[1]));
    }
    if (pairs.empty()) throw FormatError(loc(path) + ": empty atlas");

    const auto m = static_cast<std::size_t>(pairs.size());
    std::vector<std::string> by_dim(m);
    std::vector<char> seen(m, 0);
    for (const auto& [dim, label] : pairs) {
        if (static_cast<std::size_t>(dim) >= m)
            throw FormatError(loc(path) + ": dimension index " + std::to_string(dim) +
                              " out of range for " + std::to_string(m) + " rows");
        if (seen[static_cast<std::size_t>(dim)])
            throw FormatError(loc(path) + ": duplicate dimension index " + std::to_string(dim));
        seen[static_cast<std::size_t>(dim)] = 1;
        by_dim[static_cast<std::size_t>(dim)] = label;
    }

    AtlasMap atlas;
    atlas.dim_to_region.resize(m);
    std::unordered_map<std::string, int> region_index;
    for (std::size_t d = 0; d < m; ++d) {
        auto [it, inserted] =
            region_index.emplace(by_dim[d], static_cast<int>(atlas.region_labels.size()));
        if (inserted) atlas.region_labels.push_back(by_dim[d]);
        atlas.dim_to_region[d] = it->second;
    }
    atlas.validate();
    return atlas;
}

namespace {

constexpr const char* kFormatVersion = "1";

std::filesystem::path sibling(const std::filesystem::path& manifest, const std::string& suffix) {
    return manifest.parent_path() / (manifest.stem().string() + suffix);
}

void write_manifest(const std::filesystem::path& path, const nlohmann::json& manifest) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot open " + loc(path) + " for writing");
    out << manifest.dump(2) << '\n';
    out.flush();
    if (!out) throw DataError("write failed for " + loc(path));
}

nlohmann::json read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + loc(path));
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& ex) {
        throw FormatError(loc(path) + ": manifest parse error: " + ex.what());
    }
}

}  // namespace

void save_model(const std::filesystem::path& path, const MixtureModel& model) {
    const auto k = model.k();
    const auto n = model.input_dim();
    const auto m = model.output_dim();

    Matrix weights(static_cast<Eigen::Index>(k) * m, n);  // experts stacked by rows
    Matrix variances(k, m);
    for (int j = 0; j < k; ++j) {
        weights.middleRows(static_cast<Eigen::Index>(j) * m, m) =
            model.experts()[static_cast<std::size_t>(j)].weights;
        variances.row(j) = model.experts()[static_cast<std::size_t>(j)].variances.transpose();
    }

    const auto weights_file = sibling(path, ".weights.bin");
    const auto variances_file = sibling(path, ".variances.bin");
    const auto gating_file = sibling(path, ".gating.bin");
    save_matrix_bin(weights_file, weights);
    save_matrix_bin(variances_file, variances);
    save_matrix_bin(gating_file, model.gating().params);

    nlohmann::json manifest{
        {"format_version", kFormatVersion},
        {"type", "mixture"},
        {"k", k},
        {"n", n},
        {"m", m},
        {"variance_floor", model.variance_floor()},
        {"files",
         {{"weights", weights_file.filename().string()},
          {"variances", variances_file.filename().string()},
          {"gating", gating_file.filename().string()}}}};
    write_manifest(path, manifest);
}

void save_model(const std::filesystem::path& path, const RidgeModel& model) {
    check_finite(model.weights, "save_model: ridge weights");
    if (!(model.lambda >= 0.0)) throw ArgumentError("save_model: ridge lambda must be >= 0");
    const auto weights_file = sibling(path, ".weights.bin");
    save_matrix_bin(weights_file, model.weights);
    nlohmann::json manifest{{"format_version", kFormatVersion},
                            {"type", "ridge"},
                            {"n", model.input_dim()},
                            {"m", model.output_dim()},
                            {"lambda", model.lambda},
                            {"files", {{"weights", weights_file.filename().string()}}}};
    write_manifest(path, manifest);
}

AnyModel load_model(const std::filesystem::path& path) {
    const nlohmann::json manifest = read_manifest(path);
    try {
        if (manifest.at("format_version").get<std::string>() != kFormatVersion)
            throw FormatError(loc(path) + ": unsupported format_version");
        const auto type = manifest.at("type").get<std::string>();
        const auto dir = path.parent_path();

        if (type == "ridge") {
            RidgeModel model;
            model.weights =
                load_bin_values(dir / manifest.at("files").at("weights").get<std::string>());
            model.lambda = manifest.at("lambda").get<double>();
            if (!(model.lambda >= 0.0)) throw FormatError(loc(path) + ": negative lambda");
            if (model.output_dim() != manifest.at("m").get<Eigen::Index>() ||
                model.input_dim() != manifest.at("n").get<Eigen::Index>())
                throw FormatError(loc(path) + ": weights shape does not match manifest");
            return model;
        }

        if (type == "mixture") {
            const int k = manifest.at("k").get<int>();
            const auto n = manifest.at("n").get<Eigen::Index>();
            const auto m = manifest.at("m").get<Eigen::Index>();
            const double floor = manifest.at("variance_floor").get<double>();
            const auto& files = manifest.at("files");
            Matrix weights = load_bin_values(dir / files.at("weights").get<std::string>());
            Matrix variances = load_bin_values(dir / files.at("variances").get<std::string>());
            Matrix gating = load_bin_values(dir / files.at("gating").get<std::string>());
            if (k < 1 || weights.rows() != static_cast<Eigen::Index>(k) * m ||
                weights.cols() != n || variances.rows() != k || variances.cols() != m)
                throw FormatError(loc(path) + ": matrix shapes do not match manifest");

            std::vector<Expert> experts;
            experts.reserve(static_cast<std::size_t>(k));
            for (int j = 0; j < k; ++j) {
                Expert e;
                e.weights = weights.middleRows(static_cast<Eigen::Index>(j) * m, m);
                e.variances = variances.row(j).transpose();
                experts.push_back(std::move(e));
            }
            GatingNetwork gate;
            gate.params = std::move(gating);
            try {
                return MixtureModel(std::move(experts), std::move(gate), floor);
            } catch (const Error& ex) {
                throw FormatError(loc(path) + ": invalid model: " + ex.what());
            }
        }

        throw FormatError(loc(path) + ": unknown model type '" + type + "'");
    } catch (const nlohmann::json::exception& ex) {
        throw FormatError(loc(path) + ": manifest field error: " + ex.what());
    }
}

}  // namespace more
