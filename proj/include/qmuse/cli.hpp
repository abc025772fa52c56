#pragma once

namespace qmuse::cli {

// Entry point behind main(). Exit codes: 0 success, 1 usage, 2 input or
// parse failure, 3 backend unreachable or remote error, 4 internal fault.
int run(int argc, const char* const* argv);

}  // namespace qmuse::cli
