#pragma once

namespace tradescope {

/// Exit codes: 0 ok, 1 validation, 2 I/O, 3 pipeline, 4 backend.
int run_cli(int argc, char** argv);

}  // namespace tradescope
