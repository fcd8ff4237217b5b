#ifndef SHIFTQP_CLI_HPP
#define SHIFTQP_CLI_HPP

namespace shiftqp {

/// Parses and runs one command line. Returns the process exit code:
/// 0 solved/pass, 1 infeasible/limit/invalid, 2 usage or IO error.
int run_cli(int argc, const char* const* argv);

}  // namespace shiftqp

#endif
