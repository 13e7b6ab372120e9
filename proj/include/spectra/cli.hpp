#pragma once

#include <iosfwd>

namespace spectra::cli {

/// Exit codes: 0 success, 1 numerical failure (or a failed verify), 2 invalid input.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace spectra::cli
