#include "banff/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <set>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "banff/errors.hpp"

namespace banff {

// ---------------------------------------------------------------------------
// Aliases

std::string AliasTable::normalize(std::string_view label) {
    std::size_t b = 0;
    std::size_t e = label.size();
    while (b < e && std::isspace(static_cast<unsigned char>(label[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(label[e - 1]))) --e;
    std::string out(label.substr(b, e - b));
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

AliasTable AliasTable::defaults() {
    AliasTable t;
    t.set_structure("glomerulus", StructureClass::glomerulus());
    t.set_structure("glomerular tuft", StructureClass::glomerulus());
    t.set_structure("ptc", StructureClass::peritubular_capillary());
    t.set_structure("peritubular capillary", StructureClass::peritubular_capillary());
    t.set_structure("artery", StructureClass::artery());
    t.set_structure("arterial", StructureClass::artery());
    t.set_cell("lymphocyte", CellClass::lymphocyte());
    t.set_cell("monocyte", CellClass::monocyte());
    return t;
}

void AliasTable::set_structure(std::string_view label, StructureClass cls) {
    structures_.insert_or_assign(normalize(label), std::move(cls));
}

void AliasTable::set_cell(std::string_view label, CellClass cls) {
    cells_.insert_or_assign(normalize(label), std::move(cls));
}

StructureClass AliasTable::structure(std::string_view label) const {
    auto it = structures_.find(normalize(label));
    return it != structures_.end() ? it->second : StructureClass::other(std::string(label));
}

CellClass AliasTable::cell(std::string_view label) const {
    auto it = cells_.find(normalize(label));
    return it != cells_.end() ? it->second : CellClass::other(std::string(label));
}

// ---------------------------------------------------------------------------
// Structures

namespace {

Json parse_json(std::string_view bytes, std::string_view what) {
    try {
        return Json::parse(bytes.begin(), bytes.end());
    } catch (const Json::parse_error& e) {
        throw MalformedDocument(std::string(what) + " is not valid JSON: " + e.what());
    }
}

std::string feature_id(const Json& feature, std::size_t index) {
    auto id_text = [](const Json& v) -> std::optional<std::string> {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_number_integer()) return v.dump();
        return std::nullopt;
    };
    if (auto it = feature.find("id"); it != feature.end()) {
        if (auto s = id_text(*it)) return *s;
    }
    if (auto p = feature.find("properties"); p != feature.end() && p->is_object()) {
        if (auto it = p->find("id"); it != p->end()) {
            if (auto s = id_text(*it)) return *s;
        }
    }
    return "feature-" + std::to_string(index);
}

std::string feature_class(const Json& props) {
    if (!props.is_object()) return {};
    if (auto c = props.find("classification"); c != props.end() && c->is_object()) {
        if (auto n = c->find("name"); n != c->end() && n->is_string()) return n->get<std::string>();
    }
    if (auto c = props.find("class"); c != props.end() && c->is_string()) return c->get<std::string>();
    return {};
}

Ring parse_ring(const Json& coords, const std::string& fid, std::size_t ring_index) {
    const std::string where = "feature '" + fid + "' ring " + std::to_string(ring_index);
    if (!coords.is_array()) throw MalformedDocument(where + ": coordinates are not an array");
    std::vector<Point2> pts;
    pts.reserve(coords.size());
    for (const Json& pos : coords) {
        if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() || !pos[1].is_number()) {
            throw MalformedDocument(where + ": position is not [x, y]");
        }
        const Point2 p{pos[0].get<double>(), pos[1].get<double>()};
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw DegenerateGeometry(where + ": non-finite coordinate");
        }
        if (pts.empty() || !(pts.back() == p)) pts.push_back(p);
    }
    while (pts.size() > 1 && pts.back() == pts.front()) pts.pop_back();
    if (pts.size() < 3) {
        throw DegenerateGeometry(where + " has " + std::to_string(pts.size()) +
                                 " distinct vertices; at least 3 are required");
    }
    try {
        Ring ring(std::move(pts));
        if (!is_simple(ring)) throw DegenerateGeometry("ring self-intersects");
        return ring;
    } catch (const DegenerateGeometry& e) {
        throw DegenerateGeometry(where + ": " + e.what());
    }
}

PolygonWithHoles parse_polygon(const Json& rings, const std::string& fid) {
    if (!rings.is_array() || rings.empty()) {
        throw DegenerateGeometry("feature '" + fid + "': polygon has no rings");
    }
    Ring exterior = parse_ring(rings[0], fid, 0);
    std::vector<Ring> holes;
    for (std::size_t r = 1; r < rings.size(); ++r) holes.push_back(parse_ring(rings[r], fid, r));
    try {
        return PolygonWithHoles(std::move(exterior), std::move(holes));
    } catch (const DegenerateGeometry& e) {
        throw DegenerateGeometry("feature '" + fid + "': " + e.what());
    }
}

PropertyMap to_property_map(const Json& obj) {
    PropertyMap out;
    if (obj.is_object()) {
        for (auto it = obj.begin(); it != obj.end(); ++it) out.emplace(it.key(), it.value());
    }
    return out;
}

}  // namespace

namespace {

std::vector<Instance> parse_structures_impl(std::string_view geojson, const AliasTable& aliases) {
    const Json doc = parse_json(geojson, "structure document");
    if (!doc.is_object() || doc.value("type", "") != "FeatureCollection") {
        throw MalformedDocument("structure document is not a GeoJSON FeatureCollection");
    }
    auto features = doc.find("features");
    if (features == doc.end() || !features->is_array()) {
        throw MalformedDocument("FeatureCollection has no features array");
    }

    std::vector<Instance> out;
    std::unordered_set<std::string> seen;
    for (std::size_t f = 0; f < features->size(); ++f) {
        const Json& feature = (*features)[f];
        if (!feature.is_object()) {
            throw MalformedDocument("feature " + std::to_string(f) + " is not an object");
        }
        const std::string fid = feature_id(feature, f);
        const Json props = feature.value("properties", Json::object());
        auto geometry = feature.find("geometry");
        if (geometry == feature.end() || !geometry->is_object()) {
            throw MalformedDocument("feature '" + fid + "' has no geometry");
        }
        const std::string type = geometry->value("type", "");
        auto coords = geometry->find("coordinates");
        if (coords == geometry->end()) {
            throw MalformedDocument("feature '" + fid + "' geometry has no coordinates");
        }

        const std::string label = feature_class(props);
        const StructureClass cls = label.empty() ? StructureClass::other("unclassified")
                                                 : aliases.structure(label);

        auto emit = [&](std::string id, PolygonWithHoles poly) {
            if (!seen.insert(id).second) {
                throw MalformedDocument("duplicate feature id '" + id + "'");
            }
            out.push_back(Instance{std::move(id), cls, std::move(poly), to_property_map(props)});
        };

        if (type == "Polygon") {
            emit(fid, parse_polygon(*coords, fid));
        } else if (type == "MultiPolygon") {
            if (!coords->is_array() || coords->empty()) {
                throw DegenerateGeometry("feature '" + fid + "': MultiPolygon has no members");
            }
            for (std::size_t m = 0; m < coords->size(); ++m) {
                const std::string mid = fid + "#" + std::to_string(m);
                emit(mid, parse_polygon((*coords)[m], mid));
            }
        } else {
            throw MalformedDocument("feature '" + fid + "' has unsupported geometry type '" + type +
                                    "'");
        }
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Detections

namespace {

std::vector<Detection> parse_detections_impl(std::string_view json, const DetectionFilter& filter,
                                             const AliasTable& aliases) {
    const Json doc = parse_json(json, "detection document");
    if (!doc.is_object()) throw MalformedDocument("detection document is not a JSON object");
    auto points = doc.find("points");
    if (points == doc.end() || !points->is_array()) {
        throw SchemaViolation("detection document has no \"points\" array");
    }

    std::vector<Detection> out;
    for (std::size_t k = 0; k < points->size(); ++k) {
        const Json& item = (*points)[k];
        const std::string where = "point " + std::to_string(k);
        if (!item.is_object()) throw SchemaViolation(where + " is not an object");
        auto name = item.find("name");
        if (name == item.end() || !name->is_string()) {
            throw SchemaViolation(where + " has no \"name\" string");
        }
        auto pt = item.find("point");
        if (pt == item.end() || !pt->is_array() || pt->size() < 2 || !(*pt)[0].is_number() ||
            !(*pt)[1].is_number()) {
            throw SchemaViolation(where + " has no \"point\" [x, y]");
        }
        const Point2 p{(*pt)[0].get<double>(), (*pt)[1].get<double>()};
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw SchemaViolation(where + " has a non-finite coordinate");
        }
        double confidence = 1.0;
        if (auto prob = item.find("probability"); prob != item.end() && !prob->is_null()) {
            if (!prob->is_number()) throw SchemaViolation(where + ": probability is not a number");
            confidence = prob->get<double>();
            if (!(confidence >= 0.0 && confidence <= 1.0)) {
                throw SchemaViolation(where + ": probability " + prob->dump() + " is outside [0, 1]");
            }
        }
        Detection d{"d" + std::to_string(k), p, aliases.cell(name->get<std::string>()), confidence};
        if (filter.accepts(d)) {
            out.push_back(std::move(d));
        }
    }
    return out;
}

}  // namespace

std::vector<Detection> filter_detections(std::span<const Detection> detections,
                                         const DetectionFilter& filter) {
    std::vector<Detection> out;
    for (const Detection& d : detections) {
        if (filter.accepts(d)) out.push_back(d);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Ground truth

std::optional<BanffGrade> GroundTruthGrades::get(Indicator indicator) const {
    switch (indicator) {
        case Indicator::G: return g;
        case Indicator::Ptc: return ptc;
        case Indicator::V: return v;
    }
    return std::nullopt;
}

namespace {

std::optional<BanffGrade> read_grade(const Json& props, const char* key) {
    if (!props.is_object()) return std::nullopt;
    auto it = props.find(key);
    if (it == props.end() || it->is_null()) return std::nullopt;
    double value = 0.0;
    if (it->is_number()) {
        value = it->get<double>();
    } else if (it->is_string()) {
        const std::string s = it->get<std::string>();
        try {
            std::size_t used = 0;
            value = std::stod(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
        } catch (const std::exception&) {
            throw MalformedDocument(std::string(key) + " is not a number: '" + s + "'");
        }
    } else {
        throw MalformedDocument(std::string(key) + " is not a number");
    }
    if (!(value >= 0.0 && value <= 3.0) || value != std::floor(value)) {
        throw GradeOutOfRange(std::string(key) + " = " + it->dump() + " is not a grade in 0..3");
    }
    return BanffGrade(static_cast<int>(value));
}

GroundTruthGrades parse_ground_truth_impl(std::string_view geojson) {
    const Json doc = parse_json(geojson, "ground-truth document");
    if (!doc.is_object()) throw MalformedDocument("ground-truth document is not a JSON object");

    const std::string type = doc.value("type", "");
    Json collection_props = Json::object();
    std::vector<Json> feature_props;
    if (type == "FeatureCollection") {
        collection_props = doc.value("properties", Json::object());
        if (auto f = doc.find("features"); f != doc.end()) {
            if (!f->is_array()) throw MalformedDocument("features is not an array");
            for (const Json& feature : *f) {
                if (feature.is_object()) feature_props.push_back(feature.value("properties", Json::object()));
            }
        }
    } else if (type == "Feature") {
        collection_props = doc.value("properties", Json::object());
    } else {
        collection_props = doc;
    }

    GroundTruthGrades gt;
    if (collection_props.is_object()) {
        if (auto s = collection_props.find("section_id"); s != collection_props.end() && s->is_string()) {
            gt.section_id = s->get<std::string>();
        }
    }
    auto resolve = [&](const char* key) -> std::optional<BanffGrade> {
        if (auto top = read_grade(collection_props, key)) return top;
        std::optional<BanffGrade> best;
        for (const Json& props : feature_props) {
            if (auto g = read_grade(props, key); g && (!best || *g > *best)) best = g;
        }
        return best;
    };
    gt.g = resolve("banff_g");
    gt.ptc = resolve("banff_ptc");
    gt.v = resolve("banff_v");
    return gt;
}

// nlohmann type errors (e.g. a non-string "type") surface as MalformedDocument.
template <class Fn>
auto json_guard(std::string_view what, Fn&& fn) {
    try {
        return fn();
    } catch (const Json::exception& e) {
        throw MalformedDocument(std::string(what) + ": " + e.what());
    }
}

}  // namespace

std::vector<Instance> parse_structures(std::string_view geojson, const AliasTable& aliases) {
    return json_guard("structure document", [&] { return parse_structures_impl(geojson, aliases); });
}

std::vector<Detection> parse_detections(std::string_view json, const DetectionFilter& filter,
                                        const AliasTable& aliases) {
    return json_guard("detection document",
                      [&] { return parse_detections_impl(json, filter, aliases); });
}

GroundTruthGrades parse_ground_truth(std::string_view geojson) {
    return json_guard("ground-truth document", [&] { return parse_ground_truth_impl(geojson); });
}

// ---------------------------------------------------------------------------
// Dedup

std::vector<Detection> dedup_detections(std::span<const Detection> detections, double radius) {
    if (!(radius >= 0.0)) radius = 0.0;
    const std::size_t n = detections.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const Detection& da = detections[a];
        const Detection& db = detections[b];
        if (da.confidence != db.confidence) return da.confidence > db.confidence;
        if (da.id != db.id) return da.id < db.id;
        return a < b;
    });

    double max_abs = 0.0;
    for (const Detection& d : detections) {
        max_abs = std::max({max_abs, std::abs(d.point.x), std::abs(d.point.y)});
    }
    const bool use_grid = radius > 0.0 && max_abs / radius < 1e15;
    const double r2 = radius * radius;

    std::vector<char> keep(n, 0);
    if (use_grid) {
        struct KeyHash {
            std::size_t operator()(const std::pair<long long, long long>& k) const {
                return std::hash<long long>()(k.first) * 1000003u ^ std::hash<long long>()(k.second);
            }
        };
        std::unordered_map<std::pair<long long, long long>, std::vector<std::size_t>, KeyHash> grid;
        auto key = [&](Point2 p) {
            return std::pair<long long, long long>{static_cast<long long>(std::floor(p.x / radius)),
                                                   static_cast<long long>(std::floor(p.y / radius))};
        };
        for (std::size_t i : order) {
            const Detection& d = detections[i];
            const auto [cx, cy] = key(d.point);
            bool suppressed = false;
            for (long long dy = -1; dy <= 1 && !suppressed; ++dy) {
                for (long long dx = -1; dx <= 1 && !suppressed; ++dx) {
                    auto it = grid.find({cx + dx, cy + dy});
                    if (it == grid.end()) continue;
                    for (std::size_t k : it->second) {
                        const Detection& o = detections[k];
                        if (!(o.cls == d.cls)) continue;
                        const double ex = o.point.x - d.point.x;
                        const double ey = o.point.y - d.point.y;
                        if (ex * ex + ey * ey <= r2) {
                            suppressed = true;
                            break;
                        }
                    }
                }
            }
            if (!suppressed) {
                keep[i] = 1;
                grid[{cx, cy}].push_back(i);
            }
        }
    } else if (radius == 0.0) {
        std::set<std::tuple<CellClass, double, double>> taken;
        for (std::size_t i : order) {
            const Detection& d = detections[i];
            if (taken.emplace(d.cls, d.point.x, d.point.y).second) keep[i] = 1;
        }
    } else {
        std::vector<std::size_t> kept;
        for (std::size_t i : order) {
            const Detection& d = detections[i];
            const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](std::size_t k) {
                const Detection& o = detections[k];
                const double ex = o.point.x - d.point.x;
                const double ey = o.point.y - d.point.y;
                return o.cls == d.cls && ex * ex + ey * ey <= r2;
            });
            if (!suppressed) {
                keep[i] = 1;
                kept.push_back(i);
            }
        }
    }

    std::vector<Detection> out;
    for (std::size_t i = 0; i < n; ++i) {
        if (keep[i]) out.push_back(detections[i]);
    }
    return out;
}

}  // namespace banff
