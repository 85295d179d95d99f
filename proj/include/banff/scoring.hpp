#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "banff/grade.hpp"
#include "banff/ingest.hpp"
#include "banff/scene.hpp"
#include "banff/spatial_index.hpp"

namespace banff {

/// A glomerulus counts as inflamed when it holds more than this many cells.
inline constexpr std::size_t kInflamedGlomerulusThreshold = 3;

/// g from the inflamed fraction inflamed/total, compared as exact rationals:
/// 0 at zero, 1 below 1/4, 2 on [1/4, 1/2] (both ends inclusive), 3 above 1/2.
/// Requires total > 0 and inflamed <= total.
BanffGrade g_grade(std::size_t inflamed, std::size_t total);

/// ptc and v bands on the maximum per-instance count: 0 / 1-4 / 5-10 / >10.
BanffGrade max_count_grade(std::size_t max_count);

struct InstanceCount {
    std::string id;
    std::size_t count = 0;

    friend bool operator==(const InstanceCount&, const InstanceCount&) = default;
};

struct Unscorable {
    std::string reason;

    friend bool operator==(const Unscorable&, const Unscorable&) = default;
};

struct GlomerulusEntry {
    std::string id;
    std::size_t count = 0;
    bool inflamed = false;

    friend bool operator==(const GlomerulusEntry&, const GlomerulusEntry&) = default;
};

struct GScoreDetail {
    std::vector<GlomerulusEntry> per_glomerulus;
    std::size_t n_glomeruli = 0;
    std::size_t n_inflamed = 0;
    BanffGrade grade{0};

    double rho_g() const {
        return n_glomeruli == 0 ? 0.0 : static_cast<double>(n_inflamed) / static_cast<double>(n_glomeruli);
    }

    friend bool operator==(const GScoreDetail&, const GScoreDetail&) = default;
};

struct MaxCountDetail {
    std::vector<InstanceCount> per_instance;
    std::size_t max_count = 0;
    BanffGrade grade{0};

    friend bool operator==(const MaxCountDetail&, const MaxCountDetail&) = default;
};

using GResult = std::variant<GScoreDetail, Unscorable>;
using MaxCountResult = std::variant<MaxCountDetail, Unscorable>;

GResult score_g(std::span<const InstanceCount> glomeruli);
MaxCountResult score_ptc(std::span<const InstanceCount> capillaries);
MaxCountResult score_v(std::span<const InstanceCount> arteries);

struct ScoringConfig {
    double min_confidence = 0.5;
    CellClassSet g_classes = default_cell_classes();
    CellClassSet ptc_classes = default_cell_classes();
    CellClassSet v_classes = default_cell_classes();
    /// Same-class duplicate suppression radius in pixels; disabled when empty.
    std::optional<double> dedup_radius;
    std::size_t threads = 1;

    const CellClassSet& classes(Indicator indicator) const;
    /// Flat key/value view embedded in reports.
    std::map<std::string, std::string> snapshot() const;
};

struct ScoreReport {
    std::string section_id;
    GResult g = Unscorable{};
    MaxCountResult ptc = Unscorable{};
    MaxCountResult v = Unscorable{};
    std::map<std::string, std::string> config;

    /// Grade for an indicator, empty when unscorable.
    std::optional<BanffGrade> grade(Indicator indicator) const;

    friend bool operator==(const ScoreReport&, const ScoreReport&) = default;
};

/// Filters detections per indicator, assigns them to that indicator's
/// structures and grades g, ptc and v.
ScoreReport score_section(const SectionScene& scene, const ScoringConfig& config = {});

}  // namespace banff
