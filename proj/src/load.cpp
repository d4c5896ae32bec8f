#include "intdim/dataset.hpp"
#include "intdim/error.hpp"

namespace intdim {

DatasetSource parse_source(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 1 == text.size())
        throw DatasetError("dataset must be given as kind:path, got '" + std::string(text) + "'");
    const auto kind = text.substr(0, colon);
    DatasetSource src;
    src.path = std::string(text.substr(colon + 1));
    if (kind == "idx" || kind == "mnist-idx" || kind == "mnist")
        src.kind = SourceKind::Idx;
    else if (kind == "cifar10-binary" || kind == "cifar10")
        src.kind = SourceKind::Cifar10Binary;
    else if (kind == "csv")
        src.kind = SourceKind::Csv;
    else if (kind == "raw-tensor" || kind == "raw")
        src.kind = SourceKind::RawTensor;
    else if (kind == "image-directory" || kind == "images")
        src.kind = SourceKind::ImageDirectory;
    else
        throw DatasetError("unknown dataset kind '" + std::string(kind) + "'");
    return src;
}

std::string_view to_string(SourceKind kind) {
    switch (kind) {
    case SourceKind::Idx: return "idx";
    case SourceKind::Cifar10Binary: return "cifar10-binary";
    case SourceKind::Csv: return "csv";
    case SourceKind::RawTensor: return "raw-tensor";
    case SourceKind::ImageDirectory: return "image-directory";
    }
    return "unknown";
}

PointSet load(const DatasetSource& source) {
    ImageShape shape;
    std::optional<PointSet> ps;
    switch (source.kind) {
    case SourceKind::Idx: ps = load_idx(source.path, source.scale, &shape); break;
    case SourceKind::Cifar10Binary:
        ps = load_cifar10(source.path, source.scale);
        shape = {32, 32, 3};
        break;
    case SourceKind::Csv: ps = load_csv(source.path, source.csv_label_column); break;
    case SourceKind::RawTensor: ps = load_raw(source.path); break;
    case SourceKind::ImageDirectory: ps = load_image_directory(source.path, source.scale, &shape); break;
    }
    if (!source.resize)
        return std::move(*ps);

    if (shape.size() != ps->dim())
        throw DatasetError("cannot resize " + std::string(to_string(source.kind)) +
                           " data: source image shape is unknown");
    return resize_nearest(*ps, shape, *source.resize);
}

} // namespace intdim
