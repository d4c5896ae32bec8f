#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace intdim {

using Label = std::int32_t;

/// A cloud of n points in R^N, stored dense and row-major in double precision.
///
/// Every entry is finite and n, N >= 1; the constructor enforces both, so a
/// PointSet that exists is valid. Instances are immutable after construction
/// and can be shared read-only across threads.
class PointSet {
public:
    PointSet(std::size_t rows, std::size_t cols, std::vector<double> data,
             std::optional<std::vector<Label>> labels = std::nullopt, std::string name = {});

    std::size_t size() const { return rows_; }
    std::size_t dim() const { return cols_; }

    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> data() const { return data_; }

    bool has_labels() const { return labels_.has_value(); }
    std::span<const Label> labels() const;

    const std::string& name() const { return name_; }

    /// Builds a new PointSet from the given rows, in the given order.
    PointSet select(std::span<const std::size_t> rows, std::string name) const;

    friend bool operator==(const PointSet&, const PointSet&) = default;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
    std::optional<std::vector<Label>> labels_;
    std::string name_;
};

/// 64-bit FNV-1a over shape and coordinate bytes. Used to tie cached neighbor
/// tables to the dataset they were computed from.
std::uint64_t checksum(const PointSet& ps);

} // namespace intdim
