#include "intdim/dataset.hpp"
#include "intdim/error.hpp"

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include <algorithm>
#include <vector>

namespace intdim {
namespace {

bool is_image_file(const std::filesystem::path& p) {
    auto ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".bmp" || ext == ".pgm" || ext == ".ppm";
}

// Decodes to 8-bit, one channel for grayscale sources and RGB otherwise.
cv::Mat decode(const std::filesystem::path& file) {
    cv::Mat img = cv::imread(file.string(), cv::IMREAD_UNCHANGED);
    if (img.empty())
        throw DatasetError("cannot decode image " + file.string());
    if (img.depth() != CV_8U) {
        cv::Mat tmp;
        const double alpha = img.depth() == CV_16U ? 1.0 / 257.0 : 1.0;
        img.convertTo(tmp, CV_8U, alpha);
        img = tmp;
    }
    cv::Mat out;
    switch (img.channels()) {
    case 1: out = img; break;
    case 3: cv::cvtColor(img, out, cv::COLOR_BGR2RGB); break;
    case 4: cv::cvtColor(img, out, cv::COLOR_BGRA2RGB); break;
    default: throw DatasetError(file.string() + ": unsupported channel count " + std::to_string(img.channels()));
    }
    return out.isContinuous() ? out : out.clone();
}

} // namespace

PointSet load_image_directory(const std::filesystem::path& dir, bool scale, ImageShape* shape_out) {
    if (!std::filesystem::is_directory(dir))
        throw DatasetError(dir.string() + " is not a directory");
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && is_image_file(entry.path()))
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty())
        throw DatasetError(dir.string() + ": no image files");

    const double factor = scale ? 1.0 / 255.0 : 1.0;
    ImageShape shape;
    std::vector<double> data;
    for (const auto& file : files) {
        const cv::Mat img = decode(file);
        const ImageShape s{static_cast<std::size_t>(img.rows), static_cast<std::size_t>(img.cols),
                           static_cast<std::size_t>(img.channels())};
        if (data.empty()) {
            shape = s;
            data.reserve(files.size() * s.size());
        } else if (!(s == shape)) {
            throw DatasetError(file.string() + ": image is " + std::to_string(s.height) + "x" + std::to_string(s.width) +
                               "x" + std::to_string(s.channels) + ", expected " + std::to_string(shape.height) + "x" +
                               std::to_string(shape.width) + "x" + std::to_string(shape.channels));
        }
        const auto* px = img.ptr<unsigned char>(0);
        for (std::size_t i = 0; i < s.size(); ++i)
            data.push_back(px[i] * factor);
    }
    if (shape_out)
        *shape_out = shape;
    return PointSet(files.size(), shape.size(), std::move(data), std::nullopt, "image-directory:" + dir.string());
}

} // namespace intdim
