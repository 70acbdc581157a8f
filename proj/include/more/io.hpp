// io.hpp -- matrix and atlas file loading, model serialization.
#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "more/baseline.hpp"
#include "more/dataset.hpp"
#include "more/model.hpp"
#include "more/numerics.hpp"

namespace more {

enum class MatrixFormat { csv, bin };

/// ".bin" means the binary format, anything else csv.
MatrixFormat matrix_format_for(const std::filesystem::path& path);

struct LoadedMatrix {
    Matrix values;
    std::vector<std::string> ids;  // empty when the csv has no id column
};

/// csv: comma-separated decimal rows, optional leading id column
/// (auto-detected by a non-numeric first field), optional header row skipped
/// when `header` is set. bin: "MOREMAT1" magic, row/col counts as 64-bit
/// little-endian unsigned, then row-major 64-bit little-endian IEEE doubles.
/// Rejects ragged rows, unparseable cells, non-finite values, truncation.
LoadedMatrix load_matrix(const std::filesystem::path& path, MatrixFormat format,
                         bool header = false);

void save_matrix_bin(const std::filesystem::path& path, const Eigen::Ref<const Matrix>& values);
void save_matrix_csv(const std::filesystem::path& path, const Eigen::Ref<const Matrix>& values,
                     const std::vector<std::string>& ids = {});

/// csv with columns dim_index, region_label; dim indices must cover 0..m-1
/// exactly once. Region order follows first appearance in dimension order,
/// so shuffled files produce identical maps.
AtlasMap load_atlas(const std::filesystem::path& path);

using AnyModel = std::variant<MixtureModel, RidgeModel>;

/// Writes a JSON manifest at `path` plus sibling .bin matrix files next to
/// it (stacked expert weights, variances, gating parameters).
void save_model(const std::filesystem::path& path, const MixtureModel& model);
void save_model(const std::filesystem::path& path, const RidgeModel& model);

/// Parses the manifest, loads the referenced matrices, revalidates every
/// model invariant, and dispatches on the "type" tag.
AnyModel load_model(const std::filesystem::path& path);

}  // namespace more
