#include "intdim/synth.hpp"

#include "intdim/error.hpp"
#include "intdim/rng.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace intdim {
namespace {

// Stream tags so the basis, offset, and per-row draws never share a generator.
constexpr std::uint64_t kBasisStream = 0xb0;
constexpr std::uint64_t kOffsetStream = 0xb1;
constexpr std::uint64_t kNoiseBasisStream = 0xc0;
constexpr std::uint64_t kNoisePositionStream = 0xc1;
constexpr std::uint64_t kRowStream = 1ULL << 40;

Engine row_engine(std::uint64_t seed, std::size_t row) {
    return make_engine(seed, kRowStream + row);
}

} // namespace

std::string_view to_string(SyntheticKind kind) {
    switch (kind) {
    case SyntheticKind::Hypercube: return "hypercube";
    case SyntheticKind::Hypersphere: return "hypersphere";
    case SyntheticKind::Affine: return "affine";
    }
    return "unknown";
}

SyntheticKind parse_synthetic_kind(std::string_view name) {
    if (name == "hypercube")
        return SyntheticKind::Hypercube;
    if (name == "hypersphere" || name == "sphere")
        return SyntheticKind::Hypersphere;
    if (name == "affine")
        return SyntheticKind::Affine;
    throw DatasetError("unknown synthetic kind '" + std::string(name) + "'");
}

std::string_view to_string(NoiseMode mode) {
    return mode == NoiseMode::Add ? "add" : "replace-pixels";
}

NoiseMode parse_noise_mode(std::string_view name) {
    if (name == "add")
        return NoiseMode::Add;
    if (name == "replace-pixels" || name == "replace")
        return NoiseMode::ReplacePixels;
    throw DatasetError("unknown noise mode '" + std::string(name) + "'");
}

std::vector<double> random_orthonormal(std::size_t ambient, std::size_t d, std::uint64_t seed) {
    if (d == 0 || d > ambient)
        throw DatasetError("orthonormal basis needs 1 <= d <= N, got d = " + std::to_string(d) +
                           ", N = " + std::to_string(ambient));
    auto eng = make_engine(seed, kBasisStream);
    std::normal_distribution<double> gauss;
    const auto rows = static_cast<Eigen::Index>(ambient);
    const auto cols = static_cast<Eigen::Index>(d);
    Eigen::MatrixXd g(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r)
            g(r, c) = gauss(eng);

    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
    const Eigen::MatrixXd r = qr.matrixQR().topLeftCorner(cols, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
        if (r(c, c) < 0.0)
            q.col(c) *= -1.0;
    return {q.data(), q.data() + q.size()};
}

std::size_t latent_dim(const SyntheticSpec& spec) {
    return spec.kind == SyntheticKind::Hypersphere ? spec.d + 1 : spec.d;
}

std::vector<double> latent_samples(const SyntheticSpec& spec) {
    const std::size_t ld = latent_dim(spec);
    std::vector<double> z(spec.n * ld);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < spec.n; ++i) {
        auto eng = row_engine(spec.seed, i);
        double* row = z.data() + i * ld;
        if (spec.kind == SyntheticKind::Hypersphere) {
            std::normal_distribution<double> gauss;
            double norm = 0.0;
            do {
                norm = 0.0;
                for (std::size_t j = 0; j < ld; ++j) {
                    row[j] = gauss(eng);
                    norm += row[j] * row[j];
                }
            } while (norm == 0.0);
            norm = std::sqrt(norm);
            for (std::size_t j = 0; j < ld; ++j)
                row[j] /= norm;
        } else {
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            for (std::size_t j = 0; j < ld; ++j)
                row[j] = unit(eng);
        }
    }
    return z;
}

std::vector<double> embedding_basis(const SyntheticSpec& spec) {
    const std::size_t ld = latent_dim(spec);
    if (spec.kind == SyntheticKind::Hypercube && ld == spec.ambient) {
        std::vector<double> eye(ld * ld, 0.0);
        for (std::size_t i = 0; i < ld; ++i)
            eye[i * ld + i] = 1.0;
        return eye;
    }
    return random_orthonormal(spec.ambient, ld, spec.seed);
}

PointSet generate(const SyntheticSpec& spec) {
    if (spec.d == 0 || spec.n == 0 || spec.ambient == 0)
        throw DatasetError("synthetic spec needs d, N, n >= 1");
    const std::size_t ld = latent_dim(spec);
    if (ld > spec.ambient)
        throw DatasetError(std::string(to_string(spec.kind)) + " of dimension " + std::to_string(spec.d) +
                           " does not fit in N = " + std::to_string(spec.ambient));

    const auto z = latent_samples(spec);
    const auto q = embedding_basis(spec); // column-major ambient x ld
    std::vector<double> offset(spec.ambient, 0.0);
    if (spec.kind == SyntheticKind::Affine) {
        auto eng = make_engine(spec.seed, kOffsetStream);
        std::normal_distribution<double> gauss;
        for (auto& v : offset)
            v = gauss(eng);
    }

    const std::size_t N = spec.ambient;
    std::vector<double> x(spec.n * N);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < spec.n; ++i) {
        const double* zi = z.data() + i * ld;
        double* xi = x.data() + i * N;
        for (std::size_t r = 0; r < N; ++r) {
            double s = offset[r];
            for (std::size_t c = 0; c < ld; ++c)
                s += q[c * N + r] * zi[c];
            xi[r] = s;
        }
    }
    return PointSet(spec.n, N, std::move(x), std::nullopt,
                    std::string(to_string(spec.kind)) + ":d=" + std::to_string(spec.d) + ",N=" + std::to_string(N) +
                        ",n=" + std::to_string(spec.n) + ",seed=" + std::to_string(spec.seed));
}

std::vector<std::size_t> noise_positions(const NoiseSpec& spec, std::size_t ambient) {
    if (spec.d_noise == 0 || spec.d_noise > ambient)
        throw DatasetError("noise dimension must lie in [1, " + std::to_string(ambient) + "]");
    return sample_without_replacement(ambient, spec.d_noise, derive_seed(spec.seed, kNoisePositionStream));
}

PointSet add_hypercube_noise(const PointSet& ps, const NoiseSpec& spec) {
    const std::size_t N = ps.dim();
    if (spec.d_noise == 0 || spec.d_noise > N)
        throw DatasetError("noise dimension must lie in [1, " + std::to_string(N) + "]");
    std::vector<double> out(ps.data().begin(), ps.data().end());
    const std::size_t dn = spec.d_noise;

    if (spec.mode == NoiseMode::ReplacePixels) {
        const auto positions = noise_positions(spec, N);
#pragma omp parallel for schedule(static)
        for (std::size_t i = 0; i < ps.size(); ++i) {
            auto eng = row_engine(spec.seed, i);
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            double* row = out.data() + i * N;
            for (auto p : positions)
                row[p] = unit(eng);
        }
    } else {
        const auto basis = random_orthonormal(N, dn, derive_seed(spec.seed, kNoiseBasisStream));
#pragma omp parallel
        {
            std::vector<double> z(dn);
#pragma omp for schedule(static)
            for (std::size_t i = 0; i < ps.size(); ++i) {
                auto eng = row_engine(spec.seed, i);
                std::uniform_real_distribution<double> unit(0.0, 1.0);
                for (auto& v : z)
                    v = unit(eng);
                double* row = out.data() + i * N;
                for (std::size_t c = 0; c < dn; ++c) {
                    const double* col = basis.data() + c * N;
                    for (std::size_t r = 0; r < N; ++r)
                        row[r] += col[r] * z[c];
                }
            }
        }
    }

    std::optional<std::vector<Label>> labels;
    if (ps.has_labels())
        labels.emplace(ps.labels().begin(), ps.labels().end());
    return PointSet(ps.size(), N, std::move(out), std::move(labels),
                    ps.name() + "+noise(" + std::string(to_string(spec.mode)) + ",d=" + std::to_string(dn) + ")");
}

} // namespace intdim
