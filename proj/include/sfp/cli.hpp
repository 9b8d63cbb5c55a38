#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sfp {

/// Entry point of the `sfp` tool. Subcommands: fit, priors, render,
/// disambiguate, eval, patchify, synth.
///
/// Returns 0 on success, 1 on a runtime failure (one `error: <kind>: <msg>`
/// line on `err`) and 2 on a usage error.
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sfp
