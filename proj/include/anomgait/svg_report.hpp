#pragma once

#include <string>
#include <vector>

#include "anomgait/scoring.hpp"
#include "anomgait/statval.hpp"

namespace anomgait {

// Static box-summary plot of one score type, one glyph per (class_label,
// stage_label) group: whiskers at min/max, box at the quartiles, a median
// line, faint value ticks alongside. Plain standalone SVG.
void save_box_plot_svg(const std::vector<ScoreRecord>& records, ScoreKind kind,
                       const std::string& title, const std::string& path);

}  // namespace anomgait
