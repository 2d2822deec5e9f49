#pragma once

#include <ostream>

namespace mixprec {

/// Exit codes: 0 success, 1 usage or I/O error, 2 non-convergence (the CSV
/// report is still written). CSV goes to `out` unless --out names a file;
/// diagnostics go to `err`.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

int cli_main(int argc, const char* const* argv);

}  // namespace mixprec
