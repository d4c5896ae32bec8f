#include "intdim/dataset.hpp"
#include "intdim/error.hpp"

#include <array>
#include <fstream>
#include <vector>

namespace intdim {
namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::uint32_t read_be32(std::istream& in, const std::filesystem::path& path) {
    std::array<unsigned char, 4> b{};
    if (!in.read(reinterpret_cast<char*>(b.data()), 4))
        throw DatasetError(path.string() + ": truncated IDX header");
    return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) | b[3];
}

std::vector<unsigned char> read_payload(std::istream& in, std::size_t bytes, const std::filesystem::path& path) {
    std::vector<unsigned char> buf(bytes);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(bytes));
    if (static_cast<std::size_t>(in.gcount()) != bytes)
        throw DatasetError(path.string() + ": truncated IDX payload, expected " + std::to_string(bytes) +
                           " bytes, got " + std::to_string(in.gcount()));
    return buf;
}

std::vector<Label> read_idx_labels(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DatasetError("cannot open " + path.string());
    const auto magic = read_be32(in, path);
    if (magic != kLabelMagic)
        throw DatasetError(path.string() + ": bad IDX label magic number");
    const auto count = read_be32(in, path);
    const auto bytes = read_payload(in, count, path);
    return {bytes.begin(), bytes.end()};
}

std::filesystem::path resolve_images(const std::filesystem::path& path) {
    if (std::filesystem::is_directory(path))
        return path / "train-images-idx3-ubyte";
    return path;
}

std::filesystem::path labels_for(const std::filesystem::path& images) {
    auto name = images.filename().string();
    const auto pos = name.find("images-idx3");
    if (pos == std::string::npos)
        return {};
    name.replace(pos, 11, "labels-idx1");
    return images.parent_path() / name;
}

} // namespace

PointSet load_idx(const std::filesystem::path& path, bool scale, ImageShape* shape_out) {
    const auto images = resolve_images(path);
    std::ifstream in(images, std::ios::binary);
    if (!in)
        throw DatasetError("cannot open " + images.string());
    const auto magic = read_be32(in, images);
    if (magic != kImageMagic)
        throw DatasetError(images.string() + ": bad IDX image magic number");
    const std::size_t n = read_be32(in, images);
    const std::size_t h = read_be32(in, images);
    const std::size_t w = read_be32(in, images);
    if (n == 0 || h == 0 || w == 0)
        throw DatasetError(images.string() + ": empty IDX tensor");
    const auto bytes = read_payload(in, n * h * w, images);

    const double factor = scale ? 1.0 / 255.0 : 1.0;
    std::vector<double> data(bytes.size());
    for (std::size_t i = 0; i < bytes.size(); ++i)
        data[i] = bytes[i] * factor;

    std::optional<std::vector<Label>> labels;
    if (const auto lp = labels_for(images); !lp.empty() && std::filesystem::exists(lp)) {
        labels = read_idx_labels(lp);
        if (labels->size() != n)
            throw DatasetError(lp.string() + ": label count does not match image count");
    }
    if (shape_out)
        *shape_out = {h, w, 1};
    return PointSet(n, h * w, std::move(data), std::move(labels), "idx:" + images.string());
}

} // namespace intdim
