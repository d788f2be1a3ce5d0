#pragma once

namespace mrws {

/// Front door used by the mrws binary; returns the process exit code
/// (0 success, 2 verification failure, 1 usage or parse error).
int run_cli(int argc, const char* const* argv);

}  // namespace mrws
