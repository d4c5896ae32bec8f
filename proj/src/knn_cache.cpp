#include "intdim/dataset.hpp"
#include "intdim/error.hpp"
#include "intdim/knn.hpp"

#include <cstdio>
#include <fstream>

namespace intdim {
namespace {

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::filesystem::path sibling(const std::filesystem::path& path, const char* suffix) {
    auto name = path.filename();
    name += suffix;
    return name;
}

void write_u32(const std::filesystem::path& file, const std::vector<std::uint32_t>& v) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * 4));
    if (!out)
        throw KnnError("cannot write " + file.string());
}

std::vector<std::uint32_t> read_u32(const std::filesystem::path& file, std::size_t count) {
    std::ifstream in(file, std::ios::binary);
    std::vector<std::uint32_t> v(count);
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(count * 4));
    if (!in || static_cast<std::size_t>(in.gcount()) != count * 4)
        throw KnnError("truncated or missing neighbor cache file " + file.string());
    return v;
}

} // namespace

void save_neighbor_table(const NeighborTable& table, const PointSet& source, const std::filesystem::path& path) {
    if (table.rows() == 0 || table.k == 0)
        throw KnnError("refusing to cache an empty neighbor table");
    const auto anchors_file = sibling(path, ".anchors");
    const auto neighbors_file = sibling(path, ".neighbors");
    RawHeader extra{
        {"kind", "neighbor-table"},
        {"k", std::to_string(table.k)},
        {"dataset_checksum", hex64(checksum(source))},
        {"dataset_n", std::to_string(source.size())},
        {"dataset_N", std::to_string(source.dim())},
        {"anchors", anchors_file.string()},
        {"neighbors", neighbors_file.string()},
        {"name", "neighbor-table:" + source.name()},
    };
    save_raw(PointSet(table.rows(), table.k, table.distances), path, extra, /*f64=*/true);
    write_u32(path.parent_path() / anchors_file,
              std::vector<std::uint32_t>(table.anchors.begin(), table.anchors.end()));
    write_u32(path.parent_path() / neighbors_file, table.neighbors);
}

NeighborTable load_neighbor_table(const std::filesystem::path& path, const PointSet& source) {
    const auto h = read_raw_header(path);
    if (!h.contains("kind") || h.at("kind") != "neighbor-table")
        throw KnnError(path.string() + " is not a neighbor-table cache");
    if (h.at("dataset_checksum") != hex64(checksum(source)) || h.at("dataset_n") != std::to_string(source.size()) ||
        h.at("dataset_N") != std::to_string(source.dim()))
        throw KnnError(path.string() + " was computed from a different dataset");

    const PointSet dist = load_raw(path);
    NeighborTable t;
    t.k = dist.dim();
    t.distances.assign(dist.data().begin(), dist.data().end());
    const auto anchors = read_u32(path.parent_path() / h.at("anchors"), dist.size());
    t.anchors.assign(anchors.begin(), anchors.end());
    t.neighbors = read_u32(path.parent_path() / h.at("neighbors"), dist.size() * t.k);
    for (auto a : t.anchors)
        if (a >= source.size())
            throw KnnError(path.string() + ": anchor index out of range");
    for (auto v : t.neighbors)
        if (v >= source.size())
            throw KnnError(path.string() + ": neighbor index out of range");
    return t;
}

} // namespace intdim
