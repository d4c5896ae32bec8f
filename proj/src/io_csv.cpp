#include "intdim/dataset.hpp"
#include "intdim/error.hpp"

#include <charconv>
#include <fstream>
#include <string>
#include <vector>

namespace intdim {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

template <typename T>
T parse_field(std::string_view field, const std::filesystem::path& path, std::size_t line) {
    field = trim(field);
    T value{};
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw DatasetError(path.string() + ":" + std::to_string(line) + ": cannot parse '" + std::string(field) +
                           "'");
    return value;
}

} // namespace

PointSet load_csv(const std::filesystem::path& path, bool label_column) {
    std::ifstream in(path);
    if (!in)
        throw DatasetError("cannot open " + path.string());

    std::vector<double> data;
    std::vector<Label> labels;
    std::size_t cols = 0;
    std::size_t rows = 0;
    std::string line;
    std::vector<std::string_view> fields;

    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
        if (trim(line).empty())
            continue;
        fields.clear();
        std::string_view rest = line;
        for (;;) {
            const auto comma = rest.find(',');
            fields.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos)
                break;
            rest.remove_prefix(comma + 1);
        }
        std::size_t values = fields.size();
        if (label_column) {
            if (values < 2)
                throw DatasetError(path.string() + ":" + std::to_string(lineno) + ": label column needs at least 2 fields");
            labels.push_back(parse_field<Label>(fields.back(), path, lineno));
            --values;
        }
        if (rows == 0)
            cols = values;
        else if (values != cols)
            throw DatasetError(path.string() + ":" + std::to_string(lineno) + ": expected " + std::to_string(cols) +
                               " values, found " + std::to_string(values));
        for (std::size_t f = 0; f < values; ++f)
            data.push_back(parse_field<double>(fields[f], path, lineno));
        ++rows;
    }
    if (rows == 0)
        throw DatasetError(path.string() + ": no data rows");

    std::optional<std::vector<Label>> opt_labels;
    if (label_column)
        opt_labels = std::move(labels);
    return PointSet(rows, cols, std::move(data), std::move(opt_labels), "csv:" + path.string());
}

} // namespace intdim
