#pragma once

#include "intdim/point_set.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace intdim {

enum class SourceKind { Idx, Cifar10Binary, Csv, RawTensor, ImageDirectory };

struct ImageShape {
    std::size_t height = 0;
    std::size_t width = 0;
    std::size_t channels = 0;

    std::size_t size() const { return height * width * channels; }
    friend bool operator==(const ImageShape&, const ImageShape&) = default;
};

struct DatasetSource {
    SourceKind kind = SourceKind::Csv;
    std::filesystem::path path;
    bool scale = true;                   // map 8-bit pixels to [0,1]
    bool csv_label_column = false;       // last CSV column is an integer label
    std::optional<ImageShape> resize;    // nearest-neighbor resize after decoding
};

/// Parses "kind:path" where kind is one of idx (alias mnist-idx), cifar10-binary
/// (alias cifar10), csv, raw-tensor (alias raw), image-directory (alias images).
DatasetSource parse_source(std::string_view text);
std::string_view to_string(SourceKind kind);

PointSet load(const DatasetSource& source);

// Individual format readers. Directories are resolved to the conventional
// training files: train-images-idx3-ubyte, data_batch_{1..5}.bin.
PointSet load_idx(const std::filesystem::path& path, bool scale, ImageShape* shape_out = nullptr);
PointSet load_cifar10(const std::filesystem::path& path, bool scale);
PointSet load_csv(const std::filesystem::path& path, bool label_column);
PointSet load_image_directory(const std::filesystem::path& dir, bool scale, ImageShape* shape_out = nullptr);

// Raw tensor: `<path>` holds little-endian row-major values, `<path>.hdr` holds
// key=value lines with at least n and N. `dtype` is f32 (default) or f64 and a
// `labels` entry names a little-endian int32 file relative to the header.
// Extra header entries are written verbatim and returned by read_raw_header.
using RawHeader = std::map<std::string, std::string>;

PointSet load_raw(const std::filesystem::path& path);
void save_raw(const PointSet& ps, const std::filesystem::path& path, const RawHeader& extra = {},
              bool f64 = false);
RawHeader read_raw_header(const std::filesystem::path& path);
std::filesystem::path raw_header_path(const std::filesystem::path& path);

// Transforms. All return new point sets and leave the input untouched.

PointSet resize_nearest(const PointSet& ps, ImageShape src, ImageShape dst);
PointSet filter_classes(const PointSet& ps, const std::set<Label>& classes);
PointSet subsample(const PointSet& ps, std::size_t m, std::uint64_t seed);

/// Indices of the first occurrence of every distinct row, ascending.
std::vector<std::size_t> unique_rows(const PointSet& ps);

struct Deduplicated {
    PointSet points;
    std::size_t removed = 0;
};
Deduplicated deduplicate(const PointSet& ps);

} // namespace intdim
