#include "banff/synth.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "banff/errors.hpp"
#include "banff/random.hpp"

namespace banff {

namespace {

constexpr std::size_t kPlacementAttempts = 10000;
constexpr double kGap = 2.0;
// Planted points are pulled this fraction toward the vertex centroid so that
// rounding can never push them across the boundary.
constexpr double kPlantShrink = 0.999;

struct Shape {
    Ring ring;
    Point2 center;
    double bound;  // bounding-circle radius around center
};

struct ShapeParams {
    double a;
    double b;
    double theta;
    std::vector<double> angles;
};

ShapeParams draw_shape(Rng& rng, double min_radius, double max_radius) {
    const double r = rng.uniform(min_radius, max_radius);
    const double aspect = rng.uniform(0.6, 1.0);
    ShapeParams p{r / std::sqrt(aspect), r * std::sqrt(aspect), rng.uniform(0.0, std::numbers::pi), {}};
    const auto n = static_cast<std::size_t>(rng.between(12, 24));
    const double step = 2.0 * std::numbers::pi / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        p.angles.push_back(step * (static_cast<double>(k) + rng.uniform(-0.3, 0.3)));
    }
    return p;
}

// Points on an ellipse in angular order form a convex polygon.
Ring ellipse_ring(const ShapeParams& p, Point2 c) {
    const double ct = std::cos(p.theta);
    const double st = std::sin(p.theta);
    std::vector<Point2> v;
    v.reserve(p.angles.size());
    for (double t : p.angles) {
        const double ex = p.a * std::cos(t);
        const double ey = p.b * std::sin(t);
        v.push_back({c.x + ct * ex - st * ey, c.y + st * ex + ct * ey});
    }
    return Ring(std::move(v));
}

std::vector<Point2> plant_in_convex(Rng& rng, const Ring& ring, std::size_t count) {
    const auto v = ring.vertices();
    Point2 centroid{0.0, 0.0};
    for (const Point2& p : v) {
        centroid.x += p.x;
        centroid.y += p.y;
    }
    centroid.x /= static_cast<double>(v.size());
    centroid.y /= static_cast<double>(v.size());

    std::vector<double> cumulative;
    double total = 0.0;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        total += std::abs(orientation(v[0], v[i], v[i + 1])) * 0.5;
        cumulative.push_back(total);
    }

    std::vector<Point2> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const double pick = rng.uniform() * total;
        const std::size_t tri = std::min<std::size_t>(
            static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), pick) -
                                     cumulative.begin()),
            cumulative.size() - 1);
        const Point2 a = v[0], b = v[tri + 1], c = v[tri + 2];
        double s = rng.uniform();
        double t = rng.uniform();
        if (s + t > 1.0) {
            s = 1.0 - s;
            t = 1.0 - t;
        }
        const Point2 p{a.x + s * (b.x - a.x) + t * (c.x - a.x), a.y + s * (b.y - a.y) + t * (c.y - a.y)};
        out.push_back({centroid.x + kPlantShrink * (p.x - centroid.x),
                       centroid.y + kPlantShrink * (p.y - centroid.y)});
    }
    return out;
}

std::string kind_tag(StructureClass::Kind kind) {
    switch (kind) {
        case StructureClass::Kind::Glomerulus: return "glom";
        case StructureClass::Kind::PeritubularCapillary: return "ptc";
        case StructureClass::Kind::Artery: return "artery";
        case StructureClass::Kind::Other: break;
    }
    return "other";
}

StructureClass class_of(StructureClass::Kind kind) {
    switch (kind) {
        case StructureClass::Kind::Glomerulus: return StructureClass::glomerulus();
        case StructureClass::Kind::PeritubularCapillary: return StructureClass::peritubular_capillary();
        case StructureClass::Kind::Artery: return StructureClass::artery();
        case StructureClass::Kind::Other: break;
    }
    return StructureClass::other("other");
}

CellClass draw_cell_class(Rng& rng) {
    return rng.bernoulli(0.7) ? CellClass::lymphocyte() : CellClass::monocyte();
}

Json canvas_json(const BoundingBox& b) { return Json::array({b.min.x, b.min.y, b.max.x, b.max.y}); }

}  // namespace

// ---------------------------------------------------------------------------
// Scene generation

void SceneSpec::validate() const {
    if (!(canvas.min.x < canvas.max.x && canvas.min.y < canvas.max.y)) {
        throw SchemaViolation("scene spec canvas is empty");
    }
    for (StructureClass::Kind kind : kScoredKinds) {
        const ClassLayout& l = layout[kind];
        if (!(l.min_radius > 0.0 && l.min_radius <= l.max_radius) || !std::isfinite(l.max_radius)) {
            throw SchemaViolation("scene spec radius range for " + kind_tag(kind) + " is invalid");
        }
    }
}

GroundTruthGrades grades_from_counts(const std::string& section_id,
                                     const PerClass<std::vector<std::size_t>>& counts) {
    GroundTruthGrades gt;
    gt.section_id = section_id;
    if (!counts.glomerulus.empty()) {
        const auto inflamed = static_cast<std::size_t>(
            std::count_if(counts.glomerulus.begin(), counts.glomerulus.end(),
                          [](std::size_t c) { return c > kInflamedGlomerulusThreshold; }));
        gt.g = g_grade(inflamed, counts.glomerulus.size());
    }
    if (!counts.ptc.empty()) gt.ptc = max_count_grade(*std::max_element(counts.ptc.begin(), counts.ptc.end()));
    if (!counts.artery.empty()) {
        gt.v = max_count_grade(*std::max_element(counts.artery.begin(), counts.artery.end()));
    }
    return gt;
}

GeneratedScene generate_scene(const SceneSpec& spec) {
    spec.validate();
    Rng shape_rng(derive_seed(spec.seed, 0));
    Rng cell_rng(derive_seed(spec.seed, 1));
    Rng background_rng(derive_seed(spec.seed, 2));

    GeneratedScene out;
    SectionScene& scene = out.scene;
    scene.section_id = spec.section_id;
    scene.metadata["canvas"] = canvas_json(spec.canvas);
    scene.metadata["seed"] = spec.seed;

    std::vector<Shape> shapes;
    std::vector<std::size_t> planted;
    for (StructureClass::Kind kind : kScoredKinds) {
        const ClassLayout& layout = spec.layout[kind];
        for (std::size_t i = 0; i < layout.planted.size(); ++i) {
            const ShapeParams params = draw_shape(shape_rng, layout.min_radius, layout.max_radius);
            const double bound = std::max(params.a, params.b);
            const double lo_x = spec.canvas.min.x + bound + kGap, hi_x = spec.canvas.max.x - bound - kGap;
            const double lo_y = spec.canvas.min.y + bound + kGap, hi_y = spec.canvas.max.y - bound - kGap;
            if (lo_x > hi_x || lo_y > hi_y) {
                throw PlacementFailure(kind_tag(kind) + " " + std::to_string(i) + " does not fit the canvas");
            }
            std::optional<Point2> center;
            for (std::size_t attempt = 0; attempt < kPlacementAttempts && !center; ++attempt) {
                const Point2 c{shape_rng.uniform(lo_x, hi_x), shape_rng.uniform(lo_y, hi_y)};
                const bool clear = std::none_of(shapes.begin(), shapes.end(), [&](const Shape& s) {
                    return std::hypot(s.center.x - c.x, s.center.y - c.y) < s.bound + bound + kGap;
                });
                if (clear) center = c;
            }
            if (!center) {
                throw PlacementFailure("could not place " + kind_tag(kind) + " " + std::to_string(i) +
                                       " without overlap after " + std::to_string(kPlacementAttempts) +
                                       " attempts");
            }
            shapes.push_back({ellipse_ring(params, *center), *center, bound});
            planted.push_back(layout.planted[i]);
            scene.instances.push_back(Instance{kind_tag(kind) + "-" + std::to_string(i), class_of(kind),
                                               PolygonWithHoles(shapes.back().ring), {}});
        }
    }

    std::size_t next_id = 0;
    auto add_detection = [&](Point2 p, Rng& rng) {
        const CellClass cls = draw_cell_class(rng);
        const double confidence = rng.uniform(0.6, 1.0);
        scene.detections.push_back({"d" + std::to_string(next_id++), p, cls, confidence});
    };
    for (std::size_t s = 0; s < shapes.size(); ++s) {
        for (const Point2& p : plant_in_convex(cell_rng, shapes[s].ring, planted[s])) add_detection(p, cell_rng);
    }
    for (std::size_t k = 0; k < spec.background_cells; ++k) {
        std::optional<Point2> spot;
        for (std::size_t attempt = 0; attempt < kPlacementAttempts && !spot; ++attempt) {
            const Point2 p{background_rng.uniform(spec.canvas.min.x, spec.canvas.max.x),
                           background_rng.uniform(spec.canvas.min.y, spec.canvas.max.y)};
            const bool clear = std::none_of(shapes.begin(), shapes.end(), [&](const Shape& s) {
                return std::hypot(s.center.x - p.x, s.center.y - p.y) <= s.bound + 1.0;
            });
            if (clear) spot = p;
        }
        if (!spot) throw PlacementFailure("no free canvas space for background cell " + std::to_string(k));
        add_detection(*spot, background_rng);
    }

    PerClass<std::vector<std::size_t>> counts;
    for (StructureClass::Kind kind : kScoredKinds) counts[kind] = spec.layout[kind].planted;
    out.truth = grades_from_counts(spec.section_id, counts);
    return out;
}

// ---------------------------------------------------------------------------
// Perturbation

void PerturbationSpec::validate() const {
    auto prob = [](double p, const std::string& what) {
        if (!(p >= 0.0 && p <= 1.0)) throw SchemaViolation(what + " must lie in [0, 1]");
    };
    for (StructureClass::Kind kind : kScoredKinds) {
        prob(omit_prob[kind], "omit_prob." + kind_tag(kind));
        const HallucinationSpec& h = hallucinate[kind];
        if (h.count > 0) {
            if (h.cell_counts.empty()) throw SchemaViolation("hallucinate." + kind_tag(kind) + ".cell_counts is empty");
            if (!(h.min_radius > 0.0 && h.min_radius <= h.max_radius) || !std::isfinite(h.max_radius)) {
                throw SchemaViolation("hallucinate." + kind_tag(kind) + " radius range is invalid");
            }
        }
    }
    prob(detection_fn_prob, "detection_fn_prob");
    if (!(jitter_sigma >= 0.0) || !std::isfinite(jitter_sigma)) {
        throw SchemaViolation("jitter_sigma must be a finite value >= 0");
    }
}

namespace {

std::string unique_id(const std::string& base, std::unordered_set<std::string>& used) {
    std::string id = base;
    for (std::size_t k = 1; used.contains(id); ++k) id = base + "~" + std::to_string(k);
    used.insert(id);
    return id;
}

}  // namespace

SectionScene perturb_scene(const SectionScene& scene, const PerturbationSpec& spec) {
    spec.validate();
    Rng omit_rng(derive_seed(spec.seed, 0));
    Rng hallucinate_rng(derive_seed(spec.seed, 1));
    Rng fn_rng(derive_seed(spec.seed, 2));
    Rng fp_rng(derive_seed(spec.seed, 3));
    Rng jitter_rng(derive_seed(spec.seed, 4));

    SectionScene out;
    out.section_id = scene.section_id;
    out.metadata = scene.metadata;

    // 1. Omission.
    for (const Instance& inst : scene.instances) {
        bool drop = spec.omit_ids.contains(inst.id);
        if (inst.cls.is_scored()) {
            const double u = omit_rng.uniform();
            drop = drop || u < spec.omit_prob[inst.cls.kind()];
        }
        if (!drop) out.instances.push_back(inst);
    }
    out.detections = scene.detections;

    std::unordered_set<std::string> instance_ids;
    for (const Instance& i : out.instances) instance_ids.insert(i.id);
    std::unordered_set<std::string> detection_ids;
    for (const Detection& d : out.detections) detection_ids.insert(d.id);

    std::size_t total_hallucinated = 0;
    for (StructureClass::Kind kind : kScoredKinds) total_hallucinated += spec.hallucinate[kind].count;
    const BoundingBox canvas =
        spec.canvas ? *spec.canvas : scene_canvas(scene).value_or(scene_extent(scene));

    // 2. Hallucination.
    if (total_hallucinated > 0) {
        std::vector<BoundingBox> occupied;
        for (const Instance& i : out.instances) occupied.push_back(i.polygon.bbox());
        std::size_t hal_detection = 0;
        for (StructureClass::Kind kind : kScoredKinds) {
            const HallucinationSpec& h = spec.hallucinate[kind];
            for (std::size_t i = 0; i < h.count; ++i) {
                const ShapeParams params = draw_shape(hallucinate_rng, h.min_radius, h.max_radius);
                const double bound = std::max(params.a, params.b);
                const double lo_x = canvas.min.x + bound, hi_x = canvas.max.x - bound;
                const double lo_y = canvas.min.y + bound, hi_y = canvas.max.y - bound;
                if (lo_x > hi_x || lo_y > hi_y) {
                    throw PlacementFailure("hallucinated " + kind_tag(kind) + " does not fit the canvas");
                }
                std::optional<Point2> center;
                for (std::size_t attempt = 0; attempt < kPlacementAttempts && !center; ++attempt) {
                    const Point2 c{hallucinate_rng.uniform(lo_x, hi_x), hallucinate_rng.uniform(lo_y, hi_y)};
                    const BoundingBox footprint{{c.x - bound - kGap, c.y - bound - kGap},
                                                {c.x + bound + kGap, c.y + bound + kGap}};
                    const bool clear = std::none_of(occupied.begin(), occupied.end(),
                                                    [&](const BoundingBox& b) { return b.intersects(footprint); });
                    if (clear) center = c;
                }
                if (!center) {
                    throw PlacementFailure("no unoccupied canvas space for hallucinated " + kind_tag(kind));
                }
                Ring ring = ellipse_ring(params, *center);
                occupied.push_back(ring.bbox());
                const std::size_t cells =
                    h.cell_counts[static_cast<std::size_t>(hallucinate_rng.below(h.cell_counts.size()))];
                for (const Point2& p : plant_in_convex(hallucinate_rng, ring, cells)) {
                    out.detections.push_back(
                        {unique_id("hallucinated-d" + std::to_string(hal_detection++), detection_ids), p,
                         CellClass::lymphocyte(), 1.0});
                }
                out.instances.push_back(
                    Instance{unique_id("hallucinated-" + kind_tag(kind) + "-" + std::to_string(i), instance_ids),
                             class_of(kind), PolygonWithHoles(std::move(ring)), {}});
            }
        }
    }

    // 3. False-negative dropout.
    {
        std::vector<Detection> kept;
        kept.reserve(out.detections.size());
        for (Detection& d : out.detections) {
            if (!fn_rng.bernoulli(spec.detection_fn_prob)) kept.push_back(std::move(d));
        }
        out.detections = std::move(kept);
    }

    // 4. False-positive insertion.
    for (std::size_t k = 0; k < spec.detection_fp_count; ++k) {
        const Point2 p{fp_rng.uniform(canvas.min.x, canvas.max.x), fp_rng.uniform(canvas.min.y, canvas.max.y)};
        out.detections.push_back({unique_id("fp-d" + std::to_string(k), detection_ids), p,
                                  CellClass::lymphocyte(), 1.0});
    }

    // 5. Jitter; points may leave their instance.
    if (spec.jitter_sigma > 0.0) {
        for (Detection& d : out.detections) {
            d.point.x += spec.jitter_sigma * jitter_rng.normal();
            d.point.y += spec.jitter_sigma * jitter_rng.normal();
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Sensitivity

namespace {

std::array<std::optional<int>, 3> grades_of(const ScoreReport& r) {
    std::array<std::optional<int>, 3> g{};
    for (std::size_t i = 0; i < 3; ++i) {
        if (auto grade = r.grade(kIndicators[i])) g[i] = grade->value();
    }
    return g;
}

}  // namespace

SensitivityReport sensitivity_run(const SectionScene& scene, const PerturbationSpec& spec,
                                  std::size_t trials, const ScoringConfig& config, std::size_t threads) {
    if (trials == 0) throw SchemaViolation("sensitivity run needs at least one trial");
    spec.validate();

    SensitivityReport report;
    report.section_id = scene.section_id;
    report.trials = trials;
    ScoringConfig trial_config = config;
    trial_config.threads = 1;
    const auto baseline = grades_of(score_section(scene, trial_config));

    report.outcomes.resize(trials);
    auto run_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t t = begin; t < end; ++t) {
            PerturbationSpec trial_spec = spec;
            trial_spec.seed = derive_seed(spec.seed, t);
            const SectionScene perturbed = perturb_scene(scene, trial_spec);
            report.outcomes[t] = {t, trial_spec.seed, grades_of(score_section(perturbed, trial_config))};
        }
    };

    const std::size_t workers = std::clamp<std::size_t>(threads, 1, trials);
    if (workers == 1) {
        run_range(0, trials);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    run_range(trials * w / workers, trials * (w + 1) / workers);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (std::thread& t : pool) t.join();
        for (const auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }

    for (std::size_t i = 0; i < 3; ++i) {
        IndicatorSensitivity& s = report.indicators[i];
        s.baseline = baseline[i];
        std::size_t flips = 0;
        double shift = 0.0;
        for (const TrialOutcome& o : report.outcomes) {
            const std::optional<int> g = o.grades[i];
            ++s.histogram[g ? static_cast<std::size_t>(*g) : 4];
            if (g != s.baseline) ++flips;
            if (g && s.baseline) {
                shift += std::abs(*g - *s.baseline);
                ++s.shift_trials;
            }
        }
        s.flip_rate = static_cast<double>(flips) / static_cast<double>(trials);
        s.mean_abs_shift = s.shift_trials ? shift / static_cast<double>(s.shift_trials) : 0.0;
    }
    return report;
}

// ---------------------------------------------------------------------------
// JSON documents

namespace {

void reject_unknown(const Json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
            throw SchemaViolation(where + ": unknown key '" + it.key() + "'");
        }
    }
}

BoundingBox read_box(const Json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 4) throw SchemaViolation(where + " must be [min_x, min_y, max_x, max_y]");
    for (const Json& x : v) {
        if (!x.is_number()) throw SchemaViolation(where + " must hold numbers");
    }
    const BoundingBox b{{v[0].get<double>(), v[1].get<double>()}, {v[2].get<double>(), v[3].get<double>()}};
    if (!(b.min.x < b.max.x && b.min.y < b.max.y)) throw SchemaViolation(where + " is empty");
    return b;
}

std::pair<double, double> read_range(const Json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        throw SchemaViolation(where + " must be [min, max]");
    }
    return {v[0].get<double>(), v[1].get<double>()};
}

std::vector<std::size_t> read_counts(const Json& v, const std::string& where) {
    if (!v.is_array()) throw SchemaViolation(where + " must be an array of counts");
    std::vector<std::size_t> out;
    for (const Json& x : v) {
        if (!x.is_number_unsigned() && !(x.is_number_integer() && x.get<std::int64_t>() >= 0)) {
            throw SchemaViolation(where + " must hold non-negative integers");
        }
        out.push_back(x.get<std::size_t>());
    }
    return out;
}

double read_number(const Json& v, const std::string& where) {
    if (!v.is_number()) throw SchemaViolation(where + " must be a number");
    return v.get<double>();
}

std::uint64_t read_seed(const Json& v, const std::string& where) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    throw SchemaViolation(where + " must be a non-negative integer");
}

constexpr std::pair<const char*, StructureClass::Kind> kLayoutKeys[] = {
    {"glomeruli", StructureClass::Kind::Glomerulus},
    {"ptc", StructureClass::Kind::PeritubularCapillary},
    {"arteries", StructureClass::Kind::Artery}};

constexpr std::pair<const char*, StructureClass::Kind> kClassKeys[] = {
    {"glomerulus", StructureClass::Kind::Glomerulus},
    {"ptc", StructureClass::Kind::PeritubularCapillary},
    {"artery", StructureClass::Kind::Artery}};

}  // namespace

SceneSpec scene_spec_from_json(const Json& doc) {
    if (!doc.is_object()) throw SchemaViolation("scene spec must be a JSON object");
    reject_unknown(doc, {"section_id", "canvas", "seed", "background_cells", "glomeruli", "ptc", "arteries"},
                   "scene spec");
    SceneSpec spec;
    if (auto it = doc.find("section_id"); it != doc.end()) {
        if (!it->is_string()) throw SchemaViolation("scene spec section_id must be a string");
        spec.section_id = it->get<std::string>();
    }
    if (auto it = doc.find("canvas"); it != doc.end()) spec.canvas = read_box(*it, "scene spec canvas");
    if (auto it = doc.find("seed"); it != doc.end()) spec.seed = read_seed(*it, "scene spec seed");
    if (auto it = doc.find("background_cells"); it != doc.end()) {
        spec.background_cells = static_cast<std::size_t>(read_seed(*it, "background_cells"));
    }
    for (const auto& [key, kind] : kLayoutKeys) {
        auto it = doc.find(key);
        if (it == doc.end()) continue;
        const std::string where = std::string("scene spec ") + key;
        if (!it->is_object()) throw SchemaViolation(where + " must be an object");
        reject_unknown(*it, {"count", "planted", "radius"}, where);
        ClassLayout& layout = spec.layout[kind];
        std::optional<std::size_t> count;
        if (auto c = it->find("count"); c != it->end()) count = static_cast<std::size_t>(read_seed(*c, where + ".count"));
        if (auto p = it->find("planted"); p != it->end()) {
            layout.planted = read_counts(*p, where + ".planted");
            if (count && *count != layout.planted.size()) {
                throw SchemaViolation(where + ": count " + std::to_string(*count) + " differs from " +
                                      std::to_string(layout.planted.size()) + " planted entries");
            }
        } else if (count) {
            layout.planted.assign(*count, 0);
        }
        if (auto r = it->find("radius"); r != it->end()) {
            std::tie(layout.min_radius, layout.max_radius) = read_range(*r, where + ".radius");
        }
    }
    spec.validate();
    return spec;
}

Json scene_spec_to_json(const SceneSpec& spec) {
    Json doc = {{"section_id", spec.section_id},
                {"canvas", canvas_json(spec.canvas)},
                {"seed", spec.seed},
                {"background_cells", spec.background_cells}};
    for (const auto& [key, kind] : kLayoutKeys) {
        const ClassLayout& l = spec.layout[kind];
        doc[key] = {{"planted", l.planted}, {"radius", {l.min_radius, l.max_radius}}};
    }
    return doc;
}

PerturbationSpec perturbation_spec_from_json(const Json& doc) {
    if (!doc.is_object()) throw SchemaViolation("perturbation spec must be a JSON object");
    reject_unknown(doc,
                   {"seed", "omit_prob", "omit_ids", "hallucinate", "detection_fn_prob", "detection_fp_count",
                    "jitter_sigma", "canvas", "description"},
                   "perturbation spec");
    PerturbationSpec spec;
    if (auto it = doc.find("seed"); it != doc.end()) spec.seed = read_seed(*it, "perturbation spec seed");
    if (auto it = doc.find("omit_prob"); it != doc.end()) {
        if (!it->is_object()) throw SchemaViolation("omit_prob must be an object");
        reject_unknown(*it, {"glomerulus", "ptc", "artery"}, "omit_prob");
        for (const auto& [key, kind] : kClassKeys) {
            if (auto p = it->find(key); p != it->end()) spec.omit_prob[kind] = read_number(*p, std::string("omit_prob.") + key);
        }
    }
    if (auto it = doc.find("omit_ids"); it != doc.end()) {
        if (!it->is_array()) throw SchemaViolation("omit_ids must be an array of strings");
        for (const Json& id : *it) {
            if (!id.is_string()) throw SchemaViolation("omit_ids must be an array of strings");
            spec.omit_ids.insert(id.get<std::string>());
        }
    }
    if (auto it = doc.find("hallucinate"); it != doc.end()) {
        if (!it->is_object()) throw SchemaViolation("hallucinate must be an object");
        reject_unknown(*it, {"glomerulus", "ptc", "artery"}, "hallucinate");
        for (const auto& [key, kind] : kClassKeys) {
            auto h = it->find(key);
            if (h == it->end()) continue;
            const std::string where = std::string("hallucinate.") + key;
            if (!h->is_object()) throw SchemaViolation(where + " must be an object");
            reject_unknown(*h, {"count", "cell_counts", "radius"}, where);
            HallucinationSpec& hs = spec.hallucinate[kind];
            hs.min_radius = SceneSpec{}.layout[kind].min_radius;
            hs.max_radius = SceneSpec{}.layout[kind].max_radius;
            if (auto c = h->find("count"); c != h->end()) hs.count = static_cast<std::size_t>(read_seed(*c, where + ".count"));
            if (auto c = h->find("cell_counts"); c != h->end()) hs.cell_counts = read_counts(*c, where + ".cell_counts");
            if (auto r = h->find("radius"); r != h->end()) {
                std::tie(hs.min_radius, hs.max_radius) = read_range(*r, where + ".radius");
            }
        }
    }
    if (auto it = doc.find("detection_fn_prob"); it != doc.end()) {
        spec.detection_fn_prob = read_number(*it, "detection_fn_prob");
    }
    if (auto it = doc.find("detection_fp_count"); it != doc.end()) {
        spec.detection_fp_count = static_cast<std::size_t>(read_seed(*it, "detection_fp_count"));
    }
    if (auto it = doc.find("jitter_sigma"); it != doc.end()) spec.jitter_sigma = read_number(*it, "jitter_sigma");
    if (auto it = doc.find("canvas"); it != doc.end()) spec.canvas = read_box(*it, "perturbation spec canvas");
    spec.validate();
    return spec;
}

Json perturbation_spec_to_json(const PerturbationSpec& spec) {
    Json omit = Json::object();
    Json hallucinate = Json::object();
    for (const auto& [key, kind] : kClassKeys) {
        omit[key] = spec.omit_prob[kind];
        const HallucinationSpec& h = spec.hallucinate[kind];
        hallucinate[key] = {{"count", h.count}, {"cell_counts", h.cell_counts}, {"radius", {h.min_radius, h.max_radius}}};
    }
    Json doc = {{"seed", spec.seed},
                {"omit_prob", std::move(omit)},
                {"omit_ids", spec.omit_ids},
                {"hallucinate", std::move(hallucinate)},
                {"detection_fn_prob", spec.detection_fn_prob},
                {"detection_fp_count", spec.detection_fp_count},
                {"jitter_sigma", spec.jitter_sigma}};
    if (spec.canvas) doc["canvas"] = canvas_json(*spec.canvas);
    return doc;
}

Json sensitivity_report_json(const SensitivityReport& report) {
    Json indicators = Json::object();
    for (std::size_t i = 0; i < 3; ++i) {
        const IndicatorSensitivity& s = report.indicators[i];
        indicators[std::string(indicator_name(kIndicators[i]))] = {
            {"baseline", s.baseline ? Json(*s.baseline) : Json(nullptr)},
            {"histogram",
             {{"0", s.histogram[0]}, {"1", s.histogram[1]}, {"2", s.histogram[2]}, {"3", s.histogram[3]},
              {"unscorable", s.histogram[4]}}},
            {"flip_rate", s.flip_rate},
            {"mean_abs_shift", s.mean_abs_shift},
            {"shift_trials", s.shift_trials}};
    }
    return {{"section_id", report.section_id}, {"trials", report.trials}, {"indicators", std::move(indicators)}};
}

std::string sensitivity_csv(const SensitivityReport& report, const std::map<std::string, std::string>& provenance) {
    std::ostringstream out;
    for (const auto& [k, v] : provenance) out << "# " << k << ": " << v << "\n";
    out << "trial,seed,g,ptc,v\n";
    for (const TrialOutcome& o : report.outcomes) {
        out << o.trial << "," << o.seed;
        for (const auto& g : o.grades) {
            out << ",";
            if (g) {
                out << *g;
            } else {
                out << "U";
            }
        }
        out << "\n";
    }
    return out.str();
}

std::string write_ground_truth_geojson(const GroundTruthGrades& truth, const Json& extra_properties) {
    Json props = extra_properties.is_object() ? extra_properties : Json::object();
    props["section_id"] = truth.section_id;
    if (truth.g) props["banff_g"] = truth.g->value();
    if (truth.ptc) props["banff_ptc"] = truth.ptc->value();
    if (truth.v) props["banff_v"] = truth.v->value();
    Json doc = {{"type", "FeatureCollection"}, {"features", Json::array()}, {"properties", std::move(props)}};
    return doc.dump(1) + "\n";
}

}  // namespace banff
