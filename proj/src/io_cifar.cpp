#include "intdim/dataset.hpp"
#include "intdim/error.hpp"

#include <fstream>
#include <vector>

namespace intdim {
namespace {

constexpr std::size_t kSide = 32;
constexpr std::size_t kPlane = kSide * kSide;
constexpr std::size_t kPixels = 3 * kPlane;
constexpr std::size_t kRecord = 1 + kPixels;

std::vector<std::filesystem::path> batch_files(const std::filesystem::path& path) {
    if (!std::filesystem::is_directory(path))
        return {path};
    std::vector<std::filesystem::path> files;
    for (int b = 1; b <= 5; ++b)
        files.push_back(path / ("data_batch_" + std::to_string(b) + ".bin"));
    return files;
}

} // namespace

PointSet load_cifar10(const std::filesystem::path& path, bool scale) {
    const double factor = scale ? 1.0 / 255.0 : 1.0;
    std::vector<double> data;
    std::vector<Label> labels;
    std::vector<unsigned char> record(kRecord);

    for (const auto& file : batch_files(path)) {
        std::ifstream in(file, std::ios::binary);
        if (!in)
            throw DatasetError("cannot open " + file.string());
        in.seekg(0, std::ios::end);
        const auto bytes = static_cast<std::size_t>(in.tellg());
        in.seekg(0);
        if (bytes == 0 || bytes % kRecord != 0)
            throw DatasetError(file.string() + ": size " + std::to_string(bytes) +
                               " is not a whole number of 3073-byte CIFAR-10 records");
        const std::size_t records = bytes / kRecord;
        data.reserve(data.size() + records * kPixels);
        for (std::size_t r = 0; r < records; ++r) {
            if (!in.read(reinterpret_cast<char*>(record.data()), kRecord))
                throw DatasetError(file.string() + ": truncated record " + std::to_string(r));
            labels.push_back(record[0]);
            // planar R,G,B -> interleaved HWC
            for (std::size_t p = 0; p < kPlane; ++p)
                for (std::size_t c = 0; c < 3; ++c)
                    data.push_back(record[1 + c * kPlane + p] * factor);
        }
    }
    const std::size_t n = labels.size();
    return PointSet(n, kPixels, std::move(data), std::move(labels), "cifar10-binary:" + path.string());
}

} // namespace intdim
