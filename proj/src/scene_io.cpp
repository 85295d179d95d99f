#include "banff/scene_io.hpp"

#include "banff/errors.hpp"

namespace banff {

namespace {

Json ring_json(const Ring& ring) {
    Json arr = Json::array();
    for (const Point2& p : ring.vertices()) arr.push_back(Json::array({p.x, p.y}));
    return arr;
}

Json polygon_json(const PolygonWithHoles& poly) {
    Json rings = Json::array();
    rings.push_back(ring_json(poly.exterior()));
    for (const Ring& h : poly.holes()) rings.push_back(ring_json(h));
    return rings;
}

Json map_json(const PropertyMap& m) {
    Json obj = Json::object();
    for (const auto& [k, v] : m) obj[k] = v;
    return obj;
}

const Json& require(const Json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw MalformedDocument(where + " is missing \"" + key + "\"");
    return *it;
}

std::string require_string(const Json& obj, const char* key, const std::string& where) {
    const Json& v = require(obj, key, where);
    if (!v.is_string()) throw MalformedDocument(where + ": \"" + key + "\" is not a string");
    return v.get<std::string>();
}

Point2 read_point(const Json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        throw MalformedDocument(where + ": expected [x, y]");
    }
    return {v[0].get<double>(), v[1].get<double>()};
}

Ring read_ring(const Json& v, const std::string& where) {
    if (!v.is_array()) throw MalformedDocument(where + ": ring is not an array");
    std::vector<Point2> pts;
    pts.reserve(v.size());
    for (const Json& p : v) pts.push_back(read_point(p, where));
    try {
        Ring ring(std::move(pts));
        if (!is_simple(ring)) throw DegenerateGeometry("ring self-intersects");
        return ring;
    } catch (const DegenerateGeometry& e) {
        throw DegenerateGeometry(where + ": " + e.what());
    }
}

PropertyMap read_map(const Json& v, const std::string& where) {
    if (!v.is_object()) throw MalformedDocument(where + " is not an object");
    PropertyMap out;
    for (auto it = v.begin(); it != v.end(); ++it) out.emplace(it.key(), it.value());
    return out;
}

std::string dump(const Json& doc) { return doc.dump(1) + "\n"; }

}  // namespace

std::string write_scene(const SectionScene& scene) {
    Json instances = Json::array();
    for (const Instance& inst : scene.instances) {
        instances.push_back({{"id", inst.id},
                             {"class", inst.cls.label()},
                             {"polygon", polygon_json(inst.polygon)},
                             {"properties", map_json(inst.properties)}});
    }
    Json detections = Json::array();
    for (const Detection& d : scene.detections) {
        detections.push_back({{"id", d.id},
                              {"class", d.cls.label()},
                              {"point", Json::array({d.point.x, d.point.y})},
                              {"confidence", d.confidence}});
    }
    Json doc = {{"section_id", scene.section_id},
                {"instances", std::move(instances)},
                {"detections", std::move(detections)},
                {"metadata", map_json(scene.metadata)}};
    return dump(doc);
}

SectionScene read_scene(std::string_view bytes) {
    Json doc;
    try {
        doc = Json::parse(bytes.begin(), bytes.end());
    } catch (const Json::parse_error& e) {
        throw MalformedDocument(std::string("scene document is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw MalformedDocument("scene document is not a JSON object");

    try {
        SectionScene scene;
        scene.section_id = require_string(doc, "section_id", "scene");
        const Json& instances = require(doc, "instances", "scene");
        const Json& detections = require(doc, "detections", "scene");
        if (!instances.is_array()) throw MalformedDocument("scene: \"instances\" is not an array");
        if (!detections.is_array()) throw MalformedDocument("scene: \"detections\" is not an array");
        scene.metadata = read_map(require(doc, "metadata", "scene"), "scene metadata");

        for (std::size_t i = 0; i < instances.size(); ++i) {
            const Json& item = instances[i];
            const std::string where = "instance " + std::to_string(i);
            if (!item.is_object()) throw MalformedDocument(where + " is not an object");
            const std::string id = require_string(item, "id", where);
            const Json& rings = require(item, "polygon", where);
            if (!rings.is_array() || rings.empty()) {
                throw MalformedDocument("instance '" + id + "': polygon has no rings");
            }
            Ring exterior = read_ring(rings[0], "instance '" + id + "' ring 0");
            std::vector<Ring> holes;
            for (std::size_t r = 1; r < rings.size(); ++r) {
                holes.push_back(read_ring(rings[r], "instance '" + id + "' ring " + std::to_string(r)));
            }
            PropertyMap props;
            if (auto p = item.find("properties"); p != item.end()) props = read_map(*p, where + " properties");
            try {
                scene.instances.push_back(
                    Instance{id, StructureClass::from_label(require_string(item, "class", where)),
                             PolygonWithHoles(std::move(exterior), std::move(holes)), std::move(props)});
            } catch (const DegenerateGeometry& e) {
                throw DegenerateGeometry("instance '" + id + "': " + e.what());
            }
        }

        for (std::size_t i = 0; i < detections.size(); ++i) {
            const Json& item = detections[i];
            const std::string where = "detection " + std::to_string(i);
            if (!item.is_object()) throw MalformedDocument(where + " is not an object");
            const Json& conf = require(item, "confidence", where);
            if (!conf.is_number()) throw MalformedDocument(where + ": confidence is not a number");
            scene.detections.push_back(Detection{require_string(item, "id", where),
                                                 read_point(require(item, "point", where), where),
                                                 CellClass::from_label(require_string(item, "class", where)),
                                                 conf.get<double>()});
        }
        validate_scene(scene);
        return scene;
    } catch (const Json::exception& e) {
        throw MalformedDocument(std::string("scene document: ") + e.what());
    }
}

std::string write_structures_geojson(const SectionScene& scene, const Json& collection_properties) {
    Json features = Json::array();
    for (const Instance& inst : scene.instances) {
        Json props = map_json(inst.properties);
        props["classification"] = {{"name", inst.cls.kind() == StructureClass::Kind::Other
                                                ? inst.cls.name()
                                                : inst.cls.label()}};
        Json rings = polygon_json(inst.polygon);
        // GeoJSON rings are explicitly closed.
        for (Json& ring : rings) ring.push_back(ring.front());
        features.push_back({{"type", "Feature"},
                            {"id", inst.id},
                            {"geometry", {{"type", "Polygon"}, {"coordinates", std::move(rings)}}},
                            {"properties", std::move(props)}});
    }
    Json doc = {{"type", "FeatureCollection"}, {"features", std::move(features)}};
    if (!collection_properties.empty()) doc["properties"] = collection_properties;
    return dump(doc);
}

std::string write_detections_json(const SectionScene& scene, const Json& extra) {
    Json points = Json::array();
    for (const Detection& d : scene.detections) {
        points.push_back({{"name", d.cls.kind() == CellClass::Kind::Other ? d.cls.name() : d.cls.label()},
                          {"point", Json::array({d.point.x, d.point.y})},
                          {"probability", d.confidence}});
    }
    Json doc = extra.is_object() ? extra : Json::object();
    doc["points"] = std::move(points);
    return dump(doc);
}

}  // namespace banff
