#pragma once

// Umbrella header.

#include "channel.hpp"
#include "chernoff.hpp"
#include "correlations.hpp"
#include "errors.hpp"
#include "fock.hpp"
#include "gaussian.hpp"
#include "probe.hpp"
#include "scalar_search.hpp"
#include "verify.hpp"

namespace lossprobe {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace lossprobe
