#pragma once

namespace intdim {

// Worker cap for every parallel loop in the library. 0 restores the OpenMP default.
// Results never depend on this value.
void set_max_threads(int threads);
int max_threads();

} // namespace intdim
