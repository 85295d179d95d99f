#pragma once

#include <string>
#include <string_view>

#include "banff/scene.hpp"

namespace banff {

/// Canonical scene interchange document:
///
///   {"detections": [{"class", "confidence", "id", "point": [x, y]}, ...],
///    "instances":  [{"class", "id", "polygon": [[[x, y], ...], ...], "properties": {...}}, ...],
///    "metadata":   {...},
///    "section_id": "..."}
///
/// Keys are sorted, numbers use shortest round-trip formatting, and the
/// output ends with a newline, so equal scenes serialize to equal bytes.
std::string write_scene(const SectionScene& scene);

/// Inverse of write_scene. Validates geometry (including ring simplicity) and
/// id uniqueness. Throws MalformedDocument on structural problems.
SectionScene read_scene(std::string_view bytes);

/// Scene instances as a GeoJSON FeatureCollection that parse_structures reads back.
std::string write_structures_geojson(const SectionScene& scene, const Json& collection_properties = Json::object());

/// Scene detections in the detection-file schema; `extra` keys are merged at the top level.
std::string write_detections_json(const SectionScene& scene, const Json& extra = Json::object());

}  // namespace banff
