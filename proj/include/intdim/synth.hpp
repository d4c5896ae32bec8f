#pragma once

#include "intdim/point_set.hpp"

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace intdim {

enum class SyntheticKind {
    Hypercube,   // Uniform[0,1]^d
    Hypersphere, // uniform on the unit d-sphere in R^(d+1)
    Affine,      // Uniform[0,1]^d plus a random offset
};

struct SyntheticSpec {
    SyntheticKind kind = SyntheticKind::Hypercube;
    std::size_t d = 1;        // intrinsic dimension
    std::size_t ambient = 1;  // N
    std::size_t n = 1;
    std::uint64_t seed = 0;
};

std::string_view to_string(SyntheticKind kind);
SyntheticKind parse_synthetic_kind(std::string_view name);

/// Column-major N x d matrix with orthonormal columns, from the QR factorization
/// of a seeded Gaussian matrix with the signs of R's diagonal made positive.
std::vector<double> random_orthonormal(std::size_t ambient, std::size_t d, std::uint64_t seed);

/// The latent (pre-embedding) samples generate() maps into R^N: n x latent_dim,
/// row-major, where latent_dim is d, or d + 1 for the hypersphere.
std::vector<double> latent_samples(const SyntheticSpec& spec);
std::size_t latent_dim(const SyntheticSpec& spec);

/// Basis generate() embeds with (identity for a hypercube with d == N).
std::vector<double> embedding_basis(const SyntheticSpec& spec);

/// Samples with known intrinsic dimension, isometrically embedded in R^N.
/// Throws DatasetError when the latent dimension exceeds N.
PointSet generate(const SyntheticSpec& spec);

enum class NoiseMode {
    Add,           // x + B z, B a fixed random N x d orthonormal basis, z ~ U[0,1]^d
    ReplacePixels, // d fixed random coordinates overwritten with fresh U[0,1] draws
};

struct NoiseSpec {
    std::size_t d_noise = 1;
    NoiseMode mode = NoiseMode::ReplacePixels;
    std::uint64_t seed = 0;
};

std::string_view to_string(NoiseMode mode);
NoiseMode parse_noise_mode(std::string_view name);

/// Raises the intrinsic dimension of ps by noising every row exactly once.
PointSet add_hypercube_noise(const PointSet& ps, const NoiseSpec& spec);

/// Coordinates that ReplacePixels mode overwrites for this spec and ambient dim, ascending.
std::vector<std::size_t> noise_positions(const NoiseSpec& spec, std::size_t ambient);

} // namespace intdim
