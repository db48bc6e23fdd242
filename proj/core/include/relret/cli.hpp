#pragma once

namespace relret {

/// Entry point of the relret tool. Returns the process exit code:
/// 0 success, 1 configuration/usage/data errors, 2 numeric failures and
/// anything unexpected.
int run_cli(int argc, char** argv);

} // namespace relret
