#include "banff/scene.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "banff/errors.hpp"

namespace banff {

namespace {
constexpr std::string_view kOtherPrefix = "other:";
}

std::string StructureClass::label() const {
    switch (kind_) {
        case Kind::Glomerulus: return "glomerulus";
        case Kind::PeritubularCapillary: return "ptc";
        case Kind::Artery: return "artery";
        case Kind::Other: break;
    }
    return std::string(kOtherPrefix) + name_;
}

StructureClass StructureClass::from_label(const std::string& label) {
    if (label == "glomerulus") return glomerulus();
    if (label == "ptc") return peritubular_capillary();
    if (label == "artery") return artery();
    if (label.starts_with(kOtherPrefix)) return other(label.substr(kOtherPrefix.size()));
    return other(label);
}

std::string CellClass::label() const {
    switch (kind_) {
        case Kind::Lymphocyte: return "lymphocyte";
        case Kind::Monocyte: return "monocyte";
        case Kind::Other: break;
    }
    return std::string(kOtherPrefix) + name_;
}

CellClass CellClass::from_label(const std::string& label) {
    if (label == "lymphocyte") return lymphocyte();
    if (label == "monocyte") return monocyte();
    if (label.starts_with(kOtherPrefix)) return other(label.substr(kOtherPrefix.size()));
    return other(label);
}

CellClassSet default_cell_classes() { return {CellClass::lymphocyte(), CellClass::monocyte()}; }

std::size_t SectionScene::count(StructureClass::Kind kind) const {
    return static_cast<std::size_t>(std::count_if(
        instances.begin(), instances.end(), [&](const Instance& i) { return i.cls.kind() == kind; }));
}

void validate_scene(const SectionScene& scene) {
    std::unordered_set<std::string> seen;
    for (const Instance& inst : scene.instances) {
        if (!seen.insert(inst.id).second) {
            throw SchemaViolation("duplicate instance id '" + inst.id + "'");
        }
    }
    seen.clear();
    for (const Detection& d : scene.detections) {
        if (!seen.insert(d.id).second) {
            throw SchemaViolation("duplicate detection id '" + d.id + "'");
        }
        if (!(d.confidence >= 0.0 && d.confidence <= 1.0)) {
            throw SchemaViolation("detection '" + d.id + "' has confidence outside [0, 1]");
        }
        if (!std::isfinite(d.point.x) || !std::isfinite(d.point.y)) {
            throw SchemaViolation("detection '" + d.id + "' has a non-finite coordinate");
        }
    }
}

std::optional<BoundingBox> scene_canvas(const SectionScene& scene) {
    auto it = scene.metadata.find("canvas");
    if (it == scene.metadata.end()) return std::nullopt;
    const Json& c = it->second;
    if (!c.is_array() || c.size() != 4) return std::nullopt;
    for (const Json& v : c) {
        if (!v.is_number()) return std::nullopt;
    }
    BoundingBox box{{c[0].get<double>(), c[1].get<double>()}, {c[2].get<double>(), c[3].get<double>()}};
    if (!(box.min.x <= box.max.x && box.min.y <= box.max.y)) return std::nullopt;
    return box;
}

BoundingBox scene_extent(const SectionScene& scene) {
    std::optional<BoundingBox> box;
    auto add = [&](const BoundingBox& b) { box = box ? merge(*box, b) : b; };
    for (const Instance& inst : scene.instances) add(inst.polygon.bbox());
    for (const Detection& d : scene.detections) add(BoundingBox{d.point, d.point});
    return box.value_or(BoundingBox{});
}

}  // namespace banff
