#include "banff/scoring.hpp"

#include <algorithm>

#include "banff/errors.hpp"

namespace banff {

BanffGrade::BanffGrade(int value) : value_(value) {
    if (value < 0 || value > 3) {
        throw GradeOutOfRange("grade " + std::to_string(value) + " is outside 0..3");
    }
}

std::string_view indicator_name(Indicator indicator) {
    switch (indicator) {
        case Indicator::G: return "g";
        case Indicator::Ptc: return "ptc";
        case Indicator::V: return "v";
    }
    return "?";
}

std::optional<Indicator> indicator_from_name(std::string_view name) {
    for (Indicator i : kIndicators) {
        if (indicator_name(i) == name) return i;
    }
    return std::nullopt;
}

BanffGrade g_grade(std::size_t inflamed, std::size_t total) {
    if (total == 0 || inflamed > total) {
        throw std::invalid_argument("g_grade requires 0 <= inflamed <= total, total > 0");
    }
    // rho = inflamed / total; band edges 1/4 and 1/2 compared by cross-multiplying.
    if (inflamed == 0) return BanffGrade(0);
    if (4 * inflamed < total) return BanffGrade(1);
    if (2 * inflamed <= total) return BanffGrade(2);
    return BanffGrade(3);
}

BanffGrade max_count_grade(std::size_t max_count) {
    if (max_count == 0) return BanffGrade(0);
    if (max_count <= 4) return BanffGrade(1);
    if (max_count <= 10) return BanffGrade(2);
    return BanffGrade(3);
}

GResult score_g(std::span<const InstanceCount> glomeruli) {
    if (glomeruli.empty()) return Unscorable{"no glomeruli"};
    GScoreDetail d;
    d.n_glomeruli = glomeruli.size();
    for (const InstanceCount& c : glomeruli) {
        const bool inflamed = c.count > kInflamedGlomerulusThreshold;
        d.per_glomerulus.push_back({c.id, c.count, inflamed});
        if (inflamed) ++d.n_inflamed;
    }
    d.grade = g_grade(d.n_inflamed, d.n_glomeruli);
    return d;
}

namespace {

MaxCountResult score_max(std::span<const InstanceCount> instances, const char* empty_reason) {
    if (instances.empty()) return Unscorable{empty_reason};
    MaxCountDetail d;
    d.per_instance.assign(instances.begin(), instances.end());
    for (const InstanceCount& c : instances) d.max_count = std::max(d.max_count, c.count);
    d.grade = max_count_grade(d.max_count);
    return d;
}

std::string class_list(const CellClassSet& classes) {
    std::string out;
    for (const CellClass& c : classes) {
        if (!out.empty()) out += ",";
        out += c.label();
    }
    return out;
}

}  // namespace

MaxCountResult score_ptc(std::span<const InstanceCount> capillaries) {
    return score_max(capillaries, "no peritubular capillaries");
}

MaxCountResult score_v(std::span<const InstanceCount> arteries) {
    return score_max(arteries, "no arteries");
}

const CellClassSet& ScoringConfig::classes(Indicator indicator) const {
    switch (indicator) {
        case Indicator::G: return g_classes;
        case Indicator::Ptc: return ptc_classes;
        case Indicator::V: return v_classes;
    }
    return g_classes;
}

std::map<std::string, std::string> ScoringConfig::snapshot() const {
    return {
        {"min_confidence", Json(min_confidence).dump()},
        {"g_classes", class_list(g_classes)},
        {"ptc_classes", class_list(ptc_classes)},
        {"v_classes", class_list(v_classes)},
        {"dedup_radius", dedup_radius ? Json(*dedup_radius).dump() : "off"},
    };
}

std::optional<BanffGrade> ScoreReport::grade(Indicator indicator) const {
    auto pick = [](const auto& result) -> std::optional<BanffGrade> {
        using T = std::decay_t<decltype(result)>;
        if constexpr (std::is_same_v<T, GResult>) {
            if (auto* d = std::get_if<GScoreDetail>(&result)) return d->grade;
        } else {
            if (auto* d = std::get_if<MaxCountDetail>(&result)) return d->grade;
        }
        return std::nullopt;
    };
    switch (indicator) {
        case Indicator::G: return pick(g);
        case Indicator::Ptc: return pick(ptc);
        case Indicator::V: return pick(v);
    }
    return std::nullopt;
}

namespace {

std::vector<InstanceCount> counts_for(const SectionScene& scene, StructureClass::Kind kind,
                                      const CellClassSet& classes, const ScoringConfig& config) {
    std::vector<Instance> instances;
    for (const Instance& inst : scene.instances) {
        if (inst.cls.kind() == kind) instances.push_back(inst);
    }
    std::vector<Detection> detections =
        filter_detections(scene.detections, DetectionFilter{config.min_confidence, classes});
    if (config.dedup_radius) detections = dedup_detections(detections, *config.dedup_radius);

    const SpatialIndex index = build_index(instances);
    const AssignmentTable table =
        assign_detections(detections, instances, index, AssignOptions{config.threads});
    std::vector<InstanceCount> out;
    out.reserve(table.per_instance.size());
    for (const InstanceHits& h : table.per_instance) out.push_back({h.id, h.count});
    return out;
}

}  // namespace

ScoreReport score_section(const SectionScene& scene, const ScoringConfig& config) {
    validate_scene(scene);
    ScoreReport report;
    report.section_id = scene.section_id;
    report.config = config.snapshot();
    report.g = score_g(counts_for(scene, StructureClass::Kind::Glomerulus, config.g_classes, config));
    report.ptc = score_ptc(
        counts_for(scene, StructureClass::Kind::PeritubularCapillary, config.ptc_classes, config));
    report.v = score_v(counts_for(scene, StructureClass::Kind::Artery, config.v_classes, config));
    return report;
}

}  // namespace banff
