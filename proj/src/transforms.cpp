#include "intdim/dataset.hpp"
#include "intdim/error.hpp"
#include "intdim/rng.hpp"

#include <algorithm>
#include <cstring>
#include <numeric>
#include <unordered_map>

namespace intdim {

std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t m, std::uint64_t seed) {
    if (m > n)
        throw DatasetError("cannot draw " + std::to_string(m) + " of " + std::to_string(n) + " rows");
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Engine eng(mix_seed(seed));
    // partial Fisher-Yates
    for (std::size_t i = 0; i < m; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(idx[i], idx[pick(eng)]);
    }
    idx.resize(m);
    std::sort(idx.begin(), idx.end());
    return idx;
}

PointSet resize_nearest(const PointSet& ps, ImageShape src, ImageShape dst) {
    if (src.size() != ps.dim())
        throw DatasetError("source shape " + std::to_string(src.height) + "x" + std::to_string(src.width) + "x" +
                           std::to_string(src.channels) + " does not match row length " + std::to_string(ps.dim()));
    if (dst.size() == 0)
        throw DatasetError("target shape must be non-empty");

    std::vector<std::size_t> map(dst.size());
    for (std::size_t y = 0; y < dst.height; ++y) {
        const std::size_t sy = y * src.height / dst.height;
        for (std::size_t x = 0; x < dst.width; ++x) {
            const std::size_t sx = x * src.width / dst.width;
            for (std::size_t c = 0; c < dst.channels; ++c) {
                const std::size_t sc = c * src.channels / dst.channels;
                map[(y * dst.width + x) * dst.channels + c] = (sy * src.width + sx) * src.channels + sc;
            }
        }
    }

    std::vector<double> out(ps.size() * dst.size());
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const auto row = ps.row(i);
        double* o = out.data() + i * dst.size();
        for (std::size_t j = 0; j < map.size(); ++j)
            o[j] = row[map[j]];
    }
    std::optional<std::vector<Label>> labels;
    if (ps.has_labels())
        labels.emplace(ps.labels().begin(), ps.labels().end());
    return PointSet(ps.size(), dst.size(), std::move(out), std::move(labels), ps.name());
}

PointSet filter_classes(const PointSet& ps, const std::set<Label>& classes) {
    if (!ps.has_labels())
        throw DatasetError("filter_classes needs a labelled point set");
    std::vector<std::size_t> keep;
    const auto labels = ps.labels();
    for (std::size_t i = 0; i < ps.size(); ++i)
        if (classes.contains(labels[i]))
            keep.push_back(i);
    if (keep.empty())
        throw DatasetError("no rows carry any of the requested labels");
    return ps.select(keep, ps.name());
}

PointSet subsample(const PointSet& ps, std::size_t m, std::uint64_t seed) {
    if (m == 0 || m > ps.size())
        throw DatasetError("subsample size " + std::to_string(m) + " must lie in [1, " + std::to_string(ps.size()) + "]");
    const auto rows = sample_without_replacement(ps.size(), m, seed);
    return ps.select(rows, ps.name());
}

std::vector<std::size_t> unique_rows(const PointSet& ps) {
    const std::size_t cols = ps.dim();
    auto row_hash = [&](std::size_t i) {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (double v : ps.row(i)) {
            v += 0.0; // -0.0 and 0.0 compare equal, so they must hash equal
            std::uint64_t bits;
            std::memcpy(&bits, &v, sizeof bits);
            h = mix_seed(h ^ bits);
        }
        return h;
    };
    auto same = [&](std::size_t a, std::size_t b) {
        const auto ra = ps.row(a), rb = ps.row(b);
        for (std::size_t j = 0; j < cols; ++j)
            if (ra[j] != rb[j])
                return false;
        return true;
    };

    std::unordered_multimap<std::uint64_t, std::size_t> seen;
    seen.reserve(ps.size());
    std::vector<std::size_t> keep;
    keep.reserve(ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const auto h = row_hash(i);
        const auto [lo, hi] = seen.equal_range(h);
        bool dup = false;
        for (auto it = lo; it != hi && !dup; ++it)
            dup = same(it->second, i);
        if (dup)
            continue;
        seen.emplace(h, i);
        keep.push_back(i);
    }
    return keep;
}

Deduplicated deduplicate(const PointSet& ps) {
    const auto keep = unique_rows(ps);
    const std::size_t removed = ps.size() - keep.size();
    if (removed == 0)
        return {ps, 0};
    return {ps.select(keep, ps.name()), removed};
}

} // namespace intdim
