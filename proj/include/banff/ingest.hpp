#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "banff/grade.hpp"
#include "banff/scene.hpp"

namespace banff {

/// Maps free-text labels from annotation tools onto structure and cell classes.
/// Lookups are case-insensitive and ignore surrounding whitespace.
class AliasTable {
public:
    /// Empty table: every label maps to Other.
    AliasTable() = default;

    /// glomerulus, glomerular tuft -> Glomerulus; ptc, peritubular capillary ->
    /// PeritubularCapillary; artery, arterial -> Artery; lymphocyte, monocyte
    /// for cells.
    static AliasTable defaults();

    void set_structure(std::string_view label, StructureClass cls);
    void set_cell(std::string_view label, CellClass cls);

    StructureClass structure(std::string_view label) const;
    CellClass cell(std::string_view label) const;

    const std::map<std::string, StructureClass>& structure_aliases() const { return structures_; }
    const std::map<std::string, CellClass>& cell_aliases() const { return cells_; }

    static std::string normalize(std::string_view label);

private:
    std::map<std::string, StructureClass> structures_;
    std::map<std::string, CellClass> cells_;
};

/// Reads a GeoJSON FeatureCollection of Polygon / MultiPolygon features.
///
/// The class label comes from properties.classification.name, falling back to
/// properties.class. The feature id is the top-level "id", then properties.id,
/// then "feature-<index>". MultiPolygon members become separate instances with
/// ids "<id>#0", "<id>#1", ... . Ring closure duplicates and consecutive repeated
/// vertices are dropped; the first ring of each polygon is the exterior.
///
/// Throws MalformedDocument for invalid JSON or unsupported geometry, and
/// DegenerateGeometry for rings with fewer than 3 distinct vertices, zero area
/// or self-intersections. Both name the offending feature.
std::vector<Instance> parse_structures(std::string_view geojson, const AliasTable& aliases);

struct DetectionFilter {
    double min_confidence = 0.5;
    /// Accepted classes; empty optional accepts every class.
    std::optional<CellClassSet> classes = default_cell_classes();

    bool accepts(const Detection& d) const {
        return d.confidence >= min_confidence && (!classes || classes->contains(d.cls));
    }
};

/// Reads {"points": [{"name": ..., "point": [x, y], "probability": p}, ...]}.
///
/// Ids are "d<k>" where k is the point's position in the document, so they are
/// stable under filtering. probability defaults to 1.0.
std::vector<Detection> parse_detections(std::string_view json, const DetectionFilter& filter,
                                        const AliasTable& aliases = AliasTable::defaults());

struct GroundTruthGrades {
    std::string section_id;
    std::optional<BanffGrade> g;
    std::optional<BanffGrade> ptc;
    std::optional<BanffGrade> v;

    std::optional<BanffGrade> get(Indicator indicator) const;

    friend bool operator==(const GroundTruthGrades&, const GroundTruthGrades&) = default;
};

/// Grade keys banff_g, banff_ptc, banff_v. Collection-level properties win over
/// feature-level ones; among features the maximum grade is taken. A Feature or
/// a bare object is read as collection-level. section_id is read from the same
/// level when present.
GroundTruthGrades parse_ground_truth(std::string_view geojson);

/// Greedy suppression: detections are visited by (confidence desc, id asc) and
/// kept unless a kept detection of the same class lies within `radius`.
/// The result preserves input order.
std::vector<Detection> dedup_detections(std::span<const Detection> detections, double radius);

/// Applies a DetectionFilter to already-parsed detections.
std::vector<Detection> filter_detections(std::span<const Detection> detections,
                                         const DetectionFilter& filter);

}  // namespace banff
