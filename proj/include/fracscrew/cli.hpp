#pragma once

#include <string>
#include <vector>

namespace fracscrew::cli {

// Parses args (program name excluded) and runs one subcommand.
// Returns 0 on success, 1 on usage or domain errors, 2 when an iterative
// stage fails to converge. Every run writes its primary output file plus a
// <output>.manifest.json next to it.
int dispatch(const std::vector<std::string>& args);

} // namespace fracscrew::cli
