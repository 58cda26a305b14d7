#pragma once

namespace reformcause::cli {

/// CLI entry point. Returns 0 on success, 1 on pipeline errors, 2 on
/// usage errors.
int run(int argc, const char* const* argv);

} // namespace reformcause::cli
