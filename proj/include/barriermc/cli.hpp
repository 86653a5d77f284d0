#pragma once

namespace barriermc {

// Experiment-harness entry point. Exit codes: 0 success, 1 numerical
// failure, 2 configuration error.
int run(int argc, const char* const* argv);

}  // namespace barriermc
