#pragma once

namespace tsis {

/// Entry point of the `tsispipe` tool. Returns the process exit code:
/// 0 on success or help, 2 on usage errors, 1 on experiment failures.
int cli_main(int argc, const char* const* argv);

}  // namespace tsis
