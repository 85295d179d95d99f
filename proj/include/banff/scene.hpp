#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "banff/geometry.hpp"

namespace banff {

using Json = nlohmann::json;

/// Anatomical structure families that carry a Banff indicator.
class StructureClass {
public:
    enum class Kind { Glomerulus, PeritubularCapillary, Artery, Other };

    static StructureClass glomerulus() { return StructureClass(Kind::Glomerulus, {}); }
    static StructureClass peritubular_capillary() {
        return StructureClass(Kind::PeritubularCapillary, {});
    }
    static StructureClass artery() { return StructureClass(Kind::Artery, {}); }
    static StructureClass other(std::string name) { return StructureClass(Kind::Other, std::move(name)); }

    Kind kind() const { return kind_; }
    bool is_scored() const { return kind_ != Kind::Other; }
    /// Original label for Other, empty otherwise.
    const std::string& name() const { return name_; }

    /// Canonical label: "glomerulus", "ptc", "artery" or "other:<name>".
    std::string label() const;
    /// Inverse of label(); unknown text becomes Other.
    static StructureClass from_label(const std::string& label);

    friend auto operator<=>(const StructureClass&, const StructureClass&) = default;
    friend bool operator==(const StructureClass&, const StructureClass&) = default;

private:
    StructureClass(Kind kind, std::string name) : kind_(kind), name_(std::move(name)) {}

    Kind kind_;
    std::string name_;
};

class CellClass {
public:
    enum class Kind { Lymphocyte, Monocyte, Other };

    static CellClass lymphocyte() { return CellClass(Kind::Lymphocyte, {}); }
    static CellClass monocyte() { return CellClass(Kind::Monocyte, {}); }
    static CellClass other(std::string name) { return CellClass(Kind::Other, std::move(name)); }

    Kind kind() const { return kind_; }
    const std::string& name() const { return name_; }

    /// "lymphocyte", "monocyte" or "other:<name>".
    std::string label() const;
    static CellClass from_label(const std::string& label);

    friend auto operator<=>(const CellClass&, const CellClass&) = default;
    friend bool operator==(const CellClass&, const CellClass&) = default;

private:
    CellClass(Kind kind, std::string name) : kind_(kind), name_(std::move(name)) {}

    Kind kind_;
    std::string name_;
};

using CellClassSet = std::set<CellClass>;

/// {Lymphocyte, Monocyte}
CellClassSet default_cell_classes();

/// Pass-through key/value properties; values keep their JSON type.
using PropertyMap = std::map<std::string, Json>;

struct Instance {
    std::string id;
    StructureClass cls;
    PolygonWithHoles polygon;
    PropertyMap properties;

    friend bool operator==(const Instance&, const Instance&) = default;
};

struct Detection {
    std::string id;
    Point2 point;
    CellClass cls;
    double confidence = 1.0;

    friend bool operator==(const Detection&, const Detection&) = default;
};

struct SectionScene {
    std::string section_id;
    std::vector<Instance> instances;
    std::vector<Detection> detections;
    PropertyMap metadata;

    std::size_t count(StructureClass::Kind kind) const;

    friend bool operator==(const SectionScene&, const SectionScene&) = default;
};

/// Throws SchemaViolation on duplicate instance or detection ids, or on a
/// detection confidence outside [0, 1].
void validate_scene(const SectionScene& scene);

/// Canvas stored in scene metadata under "canvas" as [min_x, min_y, max_x, max_y],
/// when present and well formed.
std::optional<BoundingBox> scene_canvas(const SectionScene& scene);

/// Bounding box of every instance and detection; a zero box for an empty scene.
BoundingBox scene_extent(const SectionScene& scene);

}  // namespace banff
