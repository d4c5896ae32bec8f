#include "intdim/dataset.hpp"
#include "intdim/error.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

namespace intdim {
namespace {

static_assert(std::endian::native == std::endian::little, "raw tensor I/O assumes a little-endian host");

std::size_t parse_count(const RawHeader& h, const std::string& key, const std::filesystem::path& where) {
    const auto it = h.find(key);
    if (it == h.end())
        throw DatasetError(where.string() + ": header is missing '" + key + "'");
    try {
        std::size_t pos = 0;
        const auto v = std::stoull(it->second, &pos);
        if (pos != it->second.size())
            throw std::invalid_argument(key);
        return v;
    } catch (const std::exception&) {
        throw DatasetError(where.string() + ": header value for '" + key + "' is not a count");
    }
}

template <typename T>
std::vector<T> read_exact(const std::filesystem::path& path, std::size_t count) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DatasetError("cannot open " + path.string());
    std::vector<T> buf(count);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(count * sizeof(T)));
    if (static_cast<std::size_t>(in.gcount()) != count * sizeof(T))
        throw DatasetError(path.string() + ": truncated payload");
    if (in.peek() != std::char_traits<char>::eof())
        throw DatasetError(path.string() + ": trailing bytes after payload");
    return buf;
}

template <typename T>
void write_all(const std::filesystem::path& path, const std::vector<T>& buf) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw DatasetError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(T)));
    if (!out)
        throw DatasetError("write failed for " + path.string());
}

} // namespace

std::filesystem::path raw_header_path(const std::filesystem::path& path) {
    auto p = path;
    p += ".hdr";
    return p;
}

RawHeader read_raw_header(const std::filesystem::path& path) {
    const auto hp = raw_header_path(path);
    std::ifstream in(hp);
    if (!in)
        throw DatasetError("cannot open raw tensor header " + hp.string());
    RawHeader h;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line.front() == '#')
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw DatasetError(hp.string() + ": malformed header line '" + line + "'");
        h[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return h;
}

PointSet load_raw(const std::filesystem::path& path) {
    const auto h = read_raw_header(path);
    const auto n = parse_count(h, "n", raw_header_path(path));
    const auto cols = parse_count(h, "N", raw_header_path(path));
    const auto dtype = h.contains("dtype") ? h.at("dtype") : std::string("f32");

    std::vector<double> data;
    if (dtype == "f32") {
        const auto raw = read_exact<float>(path, n * cols);
        data.assign(raw.begin(), raw.end());
    } else if (dtype == "f64") {
        data = read_exact<double>(path, n * cols);
    } else {
        throw DatasetError(raw_header_path(path).string() + ": unknown dtype '" + dtype + "'");
    }

    std::optional<std::vector<Label>> labels;
    if (const auto it = h.find("labels"); it != h.end() && !it->second.empty())
        labels = read_exact<Label>(path.parent_path() / it->second, n);

    std::string name = h.contains("name") ? h.at("name") : "raw-tensor:" + path.string();
    return PointSet(n, cols, std::move(data), std::move(labels), std::move(name));
}

void save_raw(const PointSet& ps, const std::filesystem::path& path, const RawHeader& extra, bool f64) {
    if (f64) {
        write_all(path, std::vector<double>(ps.data().begin(), ps.data().end()));
    } else {
        std::vector<float> buf(ps.data().size());
        for (std::size_t i = 0; i < buf.size(); ++i)
            buf[i] = static_cast<float>(ps.data()[i]);
        write_all(path, buf);
    }

    RawHeader h = extra;
    h["n"] = std::to_string(ps.size());
    h["N"] = std::to_string(ps.dim());
    h["dtype"] = f64 ? "f64" : "f32";
    if (!ps.name().empty() && !h.contains("name"))
        h["name"] = ps.name();
    if (ps.has_labels()) {
        auto label_file = path.filename();
        label_file += ".labels";
        write_all(path.parent_path() / label_file, std::vector<Label>(ps.labels().begin(), ps.labels().end()));
        h["labels"] = label_file.string();
    }

    std::ofstream out(raw_header_path(path), std::ios::trunc);
    if (!out)
        throw DatasetError("cannot write " + raw_header_path(path).string());
    for (const auto& [k, v] : h) {
        if (k.find('=') != std::string::npos || k.find('\n') != std::string::npos ||
            v.find('\n') != std::string::npos)
            throw DatasetError("raw tensor header entry '" + k + "' cannot contain '=' or newlines");
        out << k << '=' << v << '\n';
    }
}

} // namespace intdim
