#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace intdim::cli {

// Exit statuses. Each failure class maps to its own code.
enum Status : int {
    kOk = 0,
    kInternalError = 1,
    kConfigError = 2,
    kDatasetError = 3,
    kKnnError = 4,
    kEstimatorError = 5,
};

/// Runs one command. `args` excludes the program name. Tables and messages go
/// to `out`; diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace intdim::cli
