#pragma once

#include <string>

#include "covsim/rollout.hpp"

namespace covsim {

struct SvgStyle {
    double pixels_per_meter = 0.4;
    double margin_px = 10.0;
    const char* nfz_fill = "#d62728";
    const char* target_fill = "#2ca02c";
    const char* covered_fill = "#c7e9f7";
    const char* path_stroke = "#1f3b73";
    const char* fov_stroke = "#ff7f0e";
};

/// Draws the map, NFZs, covered and remaining targets, the flown path, the
/// final FoV square and a start marker.  World y points up; the document's
/// y is flipped.  Output is a deterministic function of the trace.
[[nodiscard]] std::string render_svg(const Trace& trace, const SvgStyle& style = {});

}  // namespace covsim
