#pragma once

#include <stdexcept>
#include <string>

namespace intdim {

// Malformed input files, bad shapes, invalid transform arguments.
class DatasetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Neighbor search failures: k out of range, zero distances from duplicate rows.
class KnnError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Estimator preconditions and degenerate fits.
class EstimatorError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace intdim
