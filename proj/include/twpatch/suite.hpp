#pragma once

// The standalone verification battery: every check the project pins as
// its exit criteria, runnable from the CLI (`twpatch suite`) and from
// the acceptance test binary.

#include <cstdint>

#include "twpatch/report.hpp"

namespace twpatch {

struct SuiteOptions {
  std::uint64_t budget = 1000000;
};

Report acceptance_suite(const SuiteOptions& opt = {});

}  // namespace twpatch
