#pragma once

#include "liegram/scenarios.hpp"

#include <ostream>
#include <span>
#include <string>

namespace liegram {

// %.12g in the C locale.
std::string format_number(double x);
// x rounded to 12 significant digits, for JSON emission.
double round12(double x);

inline constexpr const char* kTraceHeader =
    "scenario,t,log_det_P,min_eig_P,min_eig_J,rank_Wo,temporal_term,spatial_term";

// Header plus one LF-terminated row per step of every trace, in order.
void write_trace_csv(std::ostream& out, std::span<const ScenarioTrace> traces);

// Self-contained SVG line chart of log det P over t, one polyline per trace.
std::string render_log_det_svg(std::span<const ScenarioTrace> traces);

}  // namespace liegram
