#include "intdim/point_set.hpp"

#include "intdim/error.hpp"

#include <cmath>
#include <cstring>

namespace intdim {

PointSet::PointSet(std::size_t rows, std::size_t cols, std::vector<double> data,
                   std::optional<std::vector<Label>> labels, std::string name)
    : rows_(rows), cols_(cols), data_(std::move(data)), labels_(std::move(labels)), name_(std::move(name)) {
    if (rows_ == 0 || cols_ == 0)
        throw DatasetError("point set must have at least one row and one column");
    if (data_.size() != rows_ * cols_)
        throw DatasetError("point set data has " + std::to_string(data_.size()) + " entries, expected " +
                           std::to_string(rows_ * cols_));
    for (std::size_t i = 0; i < data_.size(); ++i) {
        if (!std::isfinite(data_[i]))
            throw DatasetError("non-finite value at row " + std::to_string(i / cols_) + ", column " +
                               std::to_string(i % cols_));
    }
    if (labels_ && labels_->size() != rows_)
        throw DatasetError("label count " + std::to_string(labels_->size()) + " does not match row count " +
                           std::to_string(rows_));
}

std::span<const Label> PointSet::labels() const {
    if (!labels_)
        return {};
    return *labels_;
}

PointSet PointSet::select(std::span<const std::size_t> rows, std::string name) const {
    std::vector<double> out(rows.size() * cols_);
    std::optional<std::vector<Label>> out_labels;
    if (labels_)
        out_labels.emplace(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r] >= rows_)
            throw DatasetError("row index " + std::to_string(rows[r]) + " out of range");
        std::memcpy(out.data() + r * cols_, data_.data() + rows[r] * cols_, cols_ * sizeof(double));
        if (labels_)
            (*out_labels)[r] = (*labels_)[rows[r]];
    }
    return PointSet(rows.size(), cols_, std::move(out), std::move(out_labels), std::move(name));
}

std::uint64_t checksum(const PointSet& ps) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](const void* p, std::size_t len) {
        const auto* bytes = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= bytes[i];
            h *= 0x100000001b3ULL;
        }
    };
    const std::uint64_t shape[2] = {ps.size(), ps.dim()};
    mix(shape, sizeof(shape));
    mix(ps.data().data(), ps.data().size() * sizeof(double));
    return h;
}

} // namespace intdim
