#pragma once

#include <map>
#include <optional>
#include <string>

#include "banff/scene.hpp"
#include "banff/scoring.hpp"

namespace banff {

/// Fixed palette (stroke/fill colors).
struct Palette {
    static constexpr const char* glomerulus = "#1f77b4";
    static constexpr const char* ptc = "#2ca02c";
    static constexpr const char* artery = "#d62728";
    static constexpr const char* other_structure = "#7f7f7f";
    static constexpr const char* lymphocyte = "#9467bd";
    static constexpr const char* monocyte = "#ff7f0e";
    static constexpr const char* other_cell = "#17becf";
};

/// SVG overlay: canvas rectangle, one <polygon> per hole-free instance (a
/// <path> with even-odd fill when it has holes), one <circle> per detection,
/// and one <text> count label per scored instance when a report is given.
/// Coordinates are printed with two decimals; output bytes depend only on the inputs.
std::string render_svg(const SectionScene& scene, const ScoreReport* report = nullptr,
                       const std::map<std::string, std::string>& provenance = {});

}  // namespace banff
