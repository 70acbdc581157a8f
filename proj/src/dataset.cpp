// dataset.cpp
#include "more/dataset.hpp"

namespace more {

void Dataset::validate() const {
    check_finite(x, "Dataset.x");
    if (has_targets()) {
        check_finite(y, "Dataset.y");
        if (y.rows() != x.rows())
            throw ArgumentError("Dataset: x and y row counts differ");
    }
    if (!ids.empty() && static_cast<Eigen::Index>(ids.size()) != x.rows())
        throw ArgumentError("Dataset: id count does not match row count");
}

Dataset select_rows(const Dataset& data, const std::vector<Eigen::Index>& rows) {
    for (Eigen::Index r : rows) {
        if (r < 0 || r >= data.size())
            throw ArgumentError("select_rows: row index out of range");
    }
    const auto cnt = static_cast<Eigen::Index>(rows.size());
    Dataset out;
    out.x.resize(cnt, data.input_dim());
    if (data.has_targets()) out.y.resize(cnt, data.output_dim());
    if (!data.ids.empty()) out.ids.reserve(rows.size());
    for (Eigen::Index i = 0; i < cnt; ++i) {
        const Eigen::Index r = rows[static_cast<std::size_t>(i)];
        out.x.row(i) = data.x.row(r);
        if (data.has_targets()) out.y.row(i) = data.y.row(r);
        if (!data.ids.empty()) out.ids.push_back(data.ids[static_cast<std::size_t>(r)]);
    }
    return out;
}

std::vector<Eigen::Index> AtlasMap::region_sizes() const {
    std::vector<Eigen::Index> sizes(region_labels.size(), 0);
    for (int r : dim_to_region) ++sizes[static_cast<std::size_t>(r)];
    return sizes;
}

void AtlasMap::validate() const {
    if (region_labels.empty())
        throw ArgumentError("AtlasMap: no region labels");
    for (int r : dim_to_region) {
        if (r < 0 || static_cast<std::size_t>(r) >= region_labels.size())
            throw ArgumentError("AtlasMap: region index out of range");
    }
}

}  // namespace more
