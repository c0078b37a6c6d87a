#pragma once

#include <spdlog/spdlog.h>

namespace roekit {

/// Shared logger. Level comes from ROEKIT_LOG (trace, debug, info, warn, error, off);
/// default is warn.
spdlog::logger& log();

}  // namespace roekit
