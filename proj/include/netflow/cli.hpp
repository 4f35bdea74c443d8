#pragma once

namespace netflow {

// Entry point of the netlab tool; returns the process exit code:
//   0  success
//   2  invalid input (bad arguments, malformed or non-conforming files)
//   3  numerical failure (solver did not converge, flow halted abnormally)
//   4  unexpected internal error
int run_cli(int argc, char** argv);

}  // namespace netflow
