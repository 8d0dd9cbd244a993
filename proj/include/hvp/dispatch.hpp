#pragma once

#include <string>
#include <vector>

#include "hvp/config.hpp"
#include "hvp/picard.hpp"

namespace hvp {

/// Subcommand names accepted by dispatch.
const std::vector<std::string>& subcommands();

/// Runs one subcommand, writing artifacts and manifest.txt under
/// cfg.output.dir. Returns 0 on success, 2 on a monitor abort
/// (BlowupSignal, InvertibilityLost) and 1 on any other error.
int dispatch(const std::string& subcommand, const RunConfig& cfg);

PicardOptions picard_options(const RunConfig& cfg);

}  // namespace hvp
