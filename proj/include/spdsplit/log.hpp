#pragma once

#include <spdlog/spdlog.h>

namespace spdsplit {

// Logger writing to stderr; level from SPDSPLIT_LOG (error|info|debug), default error.
spdlog::logger& logger();

}  // namespace spdsplit
