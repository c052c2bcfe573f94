#ifndef PANELSELECT_CORE_PIPELINE_HPP
#define PANELSELECT_CORE_PIPELINE_HPP

#include <string>

#include "core/config.hpp"

namespace panelselect {

// Each command writes its artifact files under config.output.dir and
// returns a short human-readable summary. Failures throw Error.
std::string run_simulate(const RunConfig& config);
std::string run_estimate(const RunConfig& config, bool stage1_only = false);
std::string run_describe(const RunConfig& config);
std::string run_report(const RunConfig& config);

}  // namespace panelselect

#endif
