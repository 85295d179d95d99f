#pragma once

#include <string>
#include <string_view>

#include "banff/scoring.hpp"

namespace banff {

/// Deterministic JSON for a ScoreReport (sorted keys, trailing newline):
///
///   {"config": {...}, "section_id": "...", "tool": {"name", "version"},
///    "g":   {"status": "scored", "grade", "n_glomeruli", "n_inflamed", "rho_g",
///            "rho_g_fraction": "a/b", "inflamed_threshold", "per_instance": [{"id", "count", "inflamed"}]},
///    "ptc": {"status": "scored", "grade", "max_count", "per_instance": [{"id", "count"}]},
///    "v":   {"status": "unscorable", "reason": "no arteries"}}
std::string write_score_report(const ScoreReport& report);

/// Inverse of write_score_report. Throws MalformedDocument, or GradeOutOfRange
/// for a grade outside 0..3.
ScoreReport read_score_report(std::string_view bytes);

}  // namespace banff
