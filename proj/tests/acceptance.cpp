// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include "banff/cli.hpp"
#include "banff/ingest.hpp"
#include "banff/scene_io.hpp"
#include "banff/scoring.hpp"
#include "banff/synth.hpp"
#include "oracles.hpp"

using namespace banff;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

/// Collects the first few failure messages of a check.
class Check {
public:
    void require(bool ok, const std::string& message) {
        if (ok) return;
        ++failures_;
        if (failures_ <= 3) messages_ += (messages_.empty() ? "" : "; ") + message;
    }
    bool ok() const { return failures_ == 0; }
    Outcome outcome(const std::string& success) const {
        if (ok()) return {true, success};
        return {false, std::to_string(failures_) + " failure(s): " + messages_};
    }

private:
    std::size_t failures_ = 0;
    std::string messages_;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::optional<int> value(const std::optional<BanffGrade>& g) {
    return g ? std::optional<int>(g->value()) : std::nullopt;
}

std::string show(const std::optional<int>& g) { return g ? std::to_string(*g) : "U"; }

std::array<std::optional<int>, 3> grades_of(const ScoreReport& r) {
    return {value(r.grade(Indicator::G)), value(r.grade(Indicator::Ptc)), value(r.grade(Indicator::V))};
}

int run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "banff");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    if (code != 0) std::cerr << "  banff " << args[1] << " failed: " << err.str();
    return code;
}

fs::path data_file(const std::string& name) { return fs::path(BANFF_DATA_DIR) / name; }

SceneSpec load_scene_spec(const std::string& name) { return scene_spec_from_json(Json::parse(slurp(data_file(name)))); }

PerturbationSpec load_perturbation(const std::string& name) {
    return perturbation_spec_from_json(Json::parse(slurp(data_file(name))));
}

/// Random generator spec with 1..15 glomeruli, 1..15 capillaries and 1..6 arteries.
SceneSpec random_spec(std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    SceneSpec spec;
    spec.section_id = "rand-" + std::to_string(seed);
    spec.canvas = {{0, 0}, {3000, 3000}};
    spec.seed = seed;
    spec.background_cells = gen() % 200;
    auto fill = [&](std::vector<std::size_t>& v, std::size_t max_n, std::size_t max_cells) {
        v.resize(1 + gen() % max_n);
        for (auto& c : v) c = gen() % (max_cells + 1);
    };
    fill(spec.layout.glomerulus.planted, 15, 8);
    fill(spec.layout.ptc.planted, 15, 14);
    fill(spec.layout.artery.planted, 6, 14);
    return spec;
}

SectionScene transformed(const SectionScene& scene, double scale, Point2 shift) {
    auto map = [&](Point2 p) { return Point2{p.x * scale + shift.x, p.y * scale + shift.y}; };
    auto ring = [&](const Ring& r) {
        std::vector<Point2> v;
        for (const Point2& p : r.vertices()) v.push_back(map(p));
        return Ring(std::move(v));
    };
    SectionScene out = scene;
    for (Instance& inst : out.instances) {
        std::vector<Ring> holes;
        for (const Ring& h : inst.polygon.holes()) holes.push_back(ring(h));
        inst.polygon = PolygonWithHoles(ring(inst.polygon.exterior()), std::move(holes));
    }
    for (Detection& d : out.detections) d.point = map(d.point);
    return out;
}

/// Report with per-instance rows sorted by id, so order-insensitive comparison is plain equality.
ScoreReport canonical(ScoreReport r) {
    auto by_id = [](const auto& a, const auto& b) { return a.id < b.id; };
    if (auto* g = std::get_if<GScoreDetail>(&r.g)) std::sort(g->per_glomerulus.begin(), g->per_glomerulus.end(), by_id);
    for (MaxCountResult* m : {&r.ptc, &r.v}) {
        if (auto* d = std::get_if<MaxCountDetail>(m)) std::sort(d->per_instance.begin(), d->per_instance.end(), by_id);
    }
    return r;
}

// ---------------------------------------------------------------------------

Outcome g_band_sweep() {
    Check check;
    for (std::size_t i = 0; i <= 200; ++i) {
        std::vector<InstanceCount> counts;
        for (std::size_t k = 0; k < 200; ++k) counts.push_back({"g" + std::to_string(k), k < i ? 4u : 3u});
        const auto detail = std::get<GScoreDetail>(score_g(counts));
        check.require(detail.grade.value() == *oracle::g_band(i, 200), "rho=" + std::to_string(i) + "/200");
    }
    std::vector<InstanceCount> quarter = {{"a", 4}, {"b", 0}, {"c", 0}, {"d", 0}};
    check.require(std::get<GScoreDetail>(score_g(quarter)).grade.value() == 2, "rho=1/4 must be 2");
    std::vector<InstanceCount> half = {{"a", 4}, {"b", 0}};
    check.require(std::get<GScoreDetail>(score_g(half)).grade.value() == 2, "rho=1/2 must be 2");
    return check.outcome("201 grid points, 1/4 -> 2 and 1/2 -> 2");
}

Outcome count_band_sweep() {
    Check check;
    for (std::size_t n = 0; n <= 100; ++n) {
        const std::vector<InstanceCount> c = {{"x", n}, {"y", n / 2}};
        const int want = oracle::count_band(n);
        check.require(std::get<MaxCountDetail>(score_ptc(c)).grade.value() == want, "ptc n=" + std::to_string(n));
        check.require(std::get<MaxCountDetail>(score_v(c)).grade.value() == want, "v n=" + std::to_string(n));
    }
    return check.outcome("counts 0..100 for ptc and v");
}

Outcome more_than_three() {
    Check check;
    std::size_t scenes = 0;
    for (std::size_t n = 1; n <= 16; ++n) {
        SceneSpec spec;
        spec.canvas = {{0, 0}, {2048, 2048}};
        spec.seed = n;
        spec.layout.glomerulus.planted.assign(n, 3);
        const auto base = score_section(generate_scene(spec).scene);
        check.require(value(base.grade(Indicator::G)) == 0, "all-3 scene with N=" + std::to_string(n) + " not g=0");
        for (std::size_t i = 0; i < n; ++i) {
            auto raised = spec;
            raised.layout.glomerulus.planted[i] = 4;
            const auto r = score_section(generate_scene(raised).scene);
            check.require(value(r.grade(Indicator::G)).value_or(-1) >= 1,
                          "raising glomerulus " + std::to_string(i) + " of " + std::to_string(n) + " left g=0");
            ++scenes;
        }
    }
    return check.outcome("all-3 scenes give g=0 for N=1..16; " + std::to_string(scenes) + " single raises give g>=1");
}

Outcome spatial_oracle() {
    Check check;
    std::size_t discrepancies = 0, boundary = 0, holed = 0, instances = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto scene = oracle::random_scene(1000 + seed, 200, 50000);
        const auto got = assign_detections(scene.detections, scene.instances, build_index(scene.instances));
        const auto want = oracle::assign(scene.detections, scene.instances);
        if (!(got == want)) {
            ++discrepancies;
            check.require(false, "seed " + std::to_string(1000 + seed));
        }
        instances += scene.instances.size();
        for (const Instance& inst : scene.instances) {
            if (!inst.polygon.holes().empty()) ++holed;
            for (const Detection& d : scene.detections) {
                if (!inst.polygon.bbox().contains(d.point)) continue;
                bool on = oracle::on_ring(d.point, inst.polygon.exterior().vertices());
                for (const Ring& h : inst.polygon.holes()) on = on || oracle::on_ring(d.point, h.vertices());
                if (on) ++boundary;
            }
        }
    }
    check.require(holed > 0 && boundary > 0, "random scenes exercised no holes or boundary points");
    return check.outcome(std::to_string(discrepancies) + " discrepancies; " + std::to_string(instances) +
                         " instances (" + std::to_string(holed) + " with holes), 5e6 detections, " +
                         std::to_string(boundary) + " boundary hits");
}

Outcome generator_consistency() {
    Check check;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const SceneSpec spec = random_spec(seed);
        const GeneratedScene gen = generate_scene(spec);
        // Through the interchange formats and the ingest parsers, as the CLI does.
        SectionScene parsed;
        parsed.section_id = spec.section_id;
        parsed.instances = parse_structures(write_structures_geojson(gen.scene), AliasTable::defaults());
        parsed.detections = parse_detections(write_detections_json(gen.scene), DetectionFilter{0.0, std::nullopt});
        const auto got = grades_of(score_section(parsed));
        const auto want = oracle::grades_from(spec.layout.glomerulus.planted, spec.layout.ptc.planted,
                                              spec.layout.artery.planted);
        const std::array<std::optional<int>, 3> truth = {value(gen.truth.g), value(gen.truth.ptc), value(gen.truth.v)};
        const std::array<std::optional<int>, 3> expected = {want.g, want.ptc, want.v};
        check.require(got == truth && truth == expected, "seed " + std::to_string(seed) + ": scored " + show(got[0]) +
                                                             "/" + show(got[1]) + "/" + show(got[2]));
    }
    return check.outcome("100 seeds reproduce planted g, ptc, v");
}

Outcome omitted_capillary() {
    Check check;
    const GeneratedScene gen = generate_scene(load_scene_spec("omitted_ptc.scene_spec.json"));
    const auto before = value(score_section(gen.scene).grade(Indicator::Ptc));
    const auto after =
        value(score_section(perturb_scene(gen.scene, load_perturbation("omitted_ptc.perturbation.json"))).grade(Indicator::Ptc));
    check.require(value(gen.truth.ptc) == 1, "planted ptc is not 1");
    check.require(before == 1 && after == 0, "ptc " + show(before) + " -> " + show(after));
    return check.outcome("GT ptc=" + show(before) + ", after omission ptc=" + show(after));
}

Outcome hallucinated_artery() {
    Check check;
    const GeneratedScene gen = generate_scene(load_scene_spec("hallucinated_artery.scene_spec.json"));
    const auto before = value(score_section(gen.scene).grade(Indicator::V));
    const SectionScene perturbed =
        perturb_scene(gen.scene, load_perturbation("hallucinated_artery.perturbation.json"));
    const ScoreReport r = score_section(perturbed);
    const auto after = value(r.grade(Indicator::V));
    check.require(before == 0 && after == 1, "v " + show(before) + " -> " + show(after));
    check.require(perturbed.instances.size() == gen.scene.instances.size() + 1, "expected one added instance");
    const auto& v = std::get<MaxCountDetail>(r.v);
    check.require(v.per_instance.back().count == 1, "hallucinated artery does not hold exactly one detection");
    return check.outcome("GT v=" + show(before) + ", with one hallucinated 1-cell artery v=" + show(after));
}

Outcome boundary_flip() {
    Check check;
    const SectionScene scene = generate_scene(load_scene_spec("boundary_flip.scene_spec.json")).scene;
    const ScoreReport base = score_section(scene);
    const auto& g = std::get<GScoreDetail>(base.g);
    check.require(value(base.grade(Indicator::G)) == 1 && g.n_inflamed == 1, "baseline is not g=1 with one inflamed");

    // Detection ids inside the inflamed glomerulus.
    std::vector<Instance> gloms;
    for (const Instance& inst : scene.instances) {
        if (inst.cls.kind() == StructureClass::Kind::Glomerulus) gloms.push_back(inst);
    }
    const auto table = assign_detections(scene.detections, gloms, build_index(gloms));
    std::vector<std::string> inside;
    for (const auto& h : table.per_instance) {
        if (h.count > 3) inside = h.detection_ids;
    }
    check.require(inside.size() == 4, "inflamed glomerulus does not hold 4 detections");
    for (const std::string& id : inside) {
        SectionScene removed = scene;
        std::erase_if(removed.detections, [&](const Detection& d) { return d.id == id; });
        check.require(value(score_section(removed).grade(Indicator::G)) == 0, "removing " + id + " did not flip g");
    }

    PerturbationSpec spec = load_perturbation("boundary_flip.perturbation.json");
    const auto report = sensitivity_run(scene, spec, 10000);
    const double rate = report.indicators[0].flip_rate;
    const double expected = 1.0 - std::pow(0.5, 4);
    check.require(std::abs(rate - expected) <= 0.01, "flip rate " + std::to_string(rate));
    char buf[160];
    std::snprintf(buf, sizeof buf, "4/4 single removals flip g 1->0; flip rate %.4f vs %.4f (tol 0.01)", rate, expected);
    return check.outcome(buf);
}

/// 30 sections cycling through every band of every indicator.
Json batch_specs(std::vector<std::array<int, 3>>& expected) {
    std::mt19937_64 gen(2024);
    auto draw = [&](std::size_t lo, std::size_t hi) { return lo + gen() % (hi - lo + 1); };
    auto max_layout = [&](int band, std::size_t n) {
        static const std::size_t lo[] = {0, 1, 5, 11}, hi[] = {0, 4, 10, 18};
        std::vector<std::size_t> c(n);
        const std::size_t top = draw(lo[band], hi[band]);
        for (auto& x : c) x = draw(0, top);
        c[gen() % n] = top;
        return c;
    };
    Json specs = Json::array();
    for (int i = 0; i < 30; ++i) {
        const int gb = i % 4, pb = (i + 1) % 4, vb = (i / 2 + 2) % 4;
        static const std::size_t inflamed_lo[] = {0, 1, 2, 5}, inflamed_hi[] = {0, 1, 4, 8};
        const std::size_t inflamed = draw(inflamed_lo[gb], inflamed_hi[gb]);
        std::vector<std::size_t> glom(8);
        for (std::size_t k = 0; k < 8; ++k) glom[k] = k < inflamed ? draw(4, 12) : draw(0, 3);
        std::shuffle(glom.begin(), glom.end(), gen);
        const auto ptc = max_layout(pb, draw(2, 8));
        const auto art = max_layout(vb, draw(1, 4));
        const auto want = oracle::grades_from(glom, ptc, art);
        expected.push_back({*want.g, *want.ptc, *want.v});
        specs.push_back({{"section_id", "batch-" + std::to_string(i)},
                         {"canvas", {0, 0, 2048, 2048}},
                         {"seed", 500 + i},
                         {"background_cells", 50},
                         {"glomeruli", {{"planted", glom}}},
                         {"ptc", {{"planted", ptc}, {"radius", {10, 18}}}},
                         {"arteries", {{"planted", art}}}});
    }
    return specs;
}

Outcome zero_noise_evaluation(const fs::path& work) {
    Check check;
    const fs::path dir = work / "batch";
    fs::create_directories(dir);
    std::vector<std::array<int, 3>> expected;
    spit(dir / "specs.json", batch_specs(expected).dump(1));
    std::array<std::array<int, 4>, 3> coverage{};
    for (const auto& e : expected) {
        for (int i = 0; i < 3; ++i) ++coverage[i][e[i]];
    }
    for (int i = 0; i < 3; ++i) {
        for (int b = 0; b < 4; ++b) check.require(coverage[i][b] > 0, "band " + std::to_string(b) + " not covered");
    }

    check.require(run_cli({"synth", "--spec", (dir / "specs.json").string(), "--out-dir", dir.string()}) == 0, "synth");
    std::vector<std::string> score_args = {"score", "--out-dir", dir.string()};
    for (int i = 0; i < 30; ++i) {
        const std::string id = "batch-" + std::to_string(i);
        score_args.insert(score_args.end(), {"--structures", (dir / (id + ".structures.geojson")).string(),
                                             "--detections", (dir / (id + ".detections.json")).string()});
    }
    check.require(run_cli(score_args) == 0, "score");
    check.require(run_cli({"evaluate", "--manifest", (dir / "manifest.csv").string(), "--out-dir", dir.string()}) == 0,
                  "evaluate");
    if (!check.ok()) return check.outcome("");

    const Json summary = Json::parse(slurp(dir / "summary.json"));
    std::string detail;
    for (const char* name : {"g", "ptc", "v"}) {
        const Json& ind = summary["indicators"][name];
        check.require(ind["included"] == 30 && ind["excluded"] == 0, std::string(name) + ": not 30 included");
        for (int r = 0; r < 4; ++r) {
            for (int c = 0; c < 4; ++c) {
                if (r != c) check.require(ind["matrix"][r][c] == 0, std::string(name) + ": off-diagonal mass");
            }
        }
        const double exact = ind["summary"]["exact_agreement"], kappa = ind["summary"]["quadratic_weighted_kappa"];
        check.require(exact == 1.0 && kappa == 1.0, std::string(name) + ": exact/kappa not 1");
        detail += std::string(detail.empty() ? "" : ", ") + name + " exact=" + Json(exact).dump() +
                  " kappa=" + Json(kappa).dump();
    }
    return check.outcome("30 sections, diagonal matrices; " + detail);
}

Outcome determinism(const fs::path& work) {
    Check check;
    spit(work / "det_spec.json", slurp(data_file("boundary_flip.scene_spec.json")));
    spit(work / "det_perturb.json", R"({"seed": 11, "detection_fn_prob": 0.2, "detection_fp_count": 20,
        "jitter_sigma": 1.5, "omit_prob": {"glomerulus": 0.1, "ptc": 0.2, "artery": 0.2},
        "hallucinate": {"ptc": {"count": 1, "cell_counts": [0, 2, 6], "radius": [8, 12]}}})");
    const std::string id = "boundary_flip";
    std::size_t files = 0;
    std::array<fs::path, 2> dirs = {work / "det_a", work / "det_b"};
    for (std::size_t run = 0; run < 2; ++run) {
        const fs::path d = dirs[run];
        const std::string threads = run == 0 ? "1" : "4";
        check.require(run_cli({"synth", "--spec", (work / "det_spec.json").string(), "--seed", "99", "--out-dir", d.string()}) == 0, "synth");
        check.require(run_cli({"score", "--scene", (d / (id + ".scene.json")).string(), "--threads", threads,
                               "--out-dir", d.string()}) == 0, "score");
        check.require(run_cli({"evaluate", "--manifest", (d / "manifest.csv").string(), "--out-dir", d.string()}) == 0,
                      "evaluate");
        check.require(run_cli({"sensitivity", "--scene", (d / (id + ".scene.json")).string(), "--spec",
                               (work / "det_perturb.json").string(), "--trials", "500", "--threads", threads,
                               "--out-dir", d.string()}) == 0, "sensitivity");
        check.require(run_cli({"render", "--scene", (d / (id + ".scene.json")).string(), "--report",
                               (d / (id + ".score.json")).string(), "--out-dir", d.string()}) == 0, "render");
    }
    if (check.ok()) {
        for (const auto& entry : fs::directory_iterator(dirs[0])) {
            ++files;
            const fs::path other = dirs[1] / entry.path().filename();
            check.require(fs::exists(other) && slurp(entry.path()) == slurp(other),
                          entry.path().filename().string() + " differs");
        }
    }
    // Parallel and sequential sensitivity runs agree on several scenes.
    const PerturbationSpec spec = perturbation_spec_from_json(Json::parse(slurp(work / "det_perturb.json")));
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const SectionScene scene = generate_scene(random_spec(seed)).scene;
        const auto seq = sensitivity_run(scene, spec, 400, {}, 1);
        const auto par = sensitivity_run(scene, spec, 400, {}, 4);
        check.require(seq.indicators == par.indicators, "histograms differ for seed " + std::to_string(seed));
    }
    return check.outcome(std::to_string(files) + " output files byte-identical across runs (threads 1 vs 4); "
                         "5 sensitivity runs identical sequential vs parallel");
}

Outcome invariance() {
    Check check;
    std::mt19937_64 gen(77);
    std::uniform_real_distribution<double> shift(-1e4, 1e4), log_scale(std::log(0.25), std::log(8.0));
    std::size_t cases = 0;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const SectionScene scene = generate_scene(random_spec(200 + seed)).scene;
        const ScoreReport base = score_section(scene);
        for (int t = 0; t < 3; ++t) {
            const double s = std::exp(log_scale(gen));
            const Point2 d{shift(gen), shift(gen)};
            check.require(grades_of(score_section(transformed(scene, 1.0, d))) == grades_of(base),
                          "translation changed grades, seed " + std::to_string(seed));
            check.require(grades_of(score_section(transformed(scene, s, {0, 0}))) == grades_of(base),
                          "scaling changed grades, seed " + std::to_string(seed));
            check.require(grades_of(score_section(transformed(scene, s, d))) == grades_of(base),
                          "scale+shift changed grades, seed " + std::to_string(seed));
            SectionScene shuffled = scene;
            std::shuffle(shuffled.instances.begin(), shuffled.instances.end(), gen);
            std::shuffle(shuffled.detections.begin(), shuffled.detections.end(), gen);
            check.require(canonical(score_section(shuffled)) == canonical(base),
                          "permutation changed the report, seed " + std::to_string(seed));
            cases += 4;
        }
    }
    return check.outcome(std::to_string(cases) + " transformed or permuted scenes match their originals");
}

Outcome monotonicity() {
    Check check;
    std::mt19937_64 gen(4242);
    std::vector<SectionScene> scenes;
    for (std::uint64_t seed = 0; seed < 40; ++seed) scenes.push_back(generate_scene(random_spec(300 + seed)).scene);

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int c = 0; c < 1000; ++c) {
        const SectionScene& scene = scenes[gen() % scenes.size()];
        const auto before = grades_of(score_section(scene));
        SectionScene added = scene;
        Point2 p{unit(gen) * 3000, unit(gen) * 3000};
        if (gen() % 2 == 0) {
            // Inside a random instance: a convex combination of its vertices.
            const auto v = scene.instances[gen() % scene.instances.size()].polygon.exterior().vertices();
            double wx = 0, wy = 0, wsum = 0;
            for (const Point2& q : v) {
                const double w = unit(gen);
                wx += w * q.x;
                wy += w * q.y;
                wsum += w;
            }
            p = {wx / wsum, wy / wsum};
        }
        added.detections.push_back({"added", p, gen() % 2 ? CellClass::lymphocyte() : CellClass::monocyte(), 0.5 + unit(gen) / 2});
        const auto after = grades_of(score_section(added));
        for (int i = 0; i < 3; ++i) {
            check.require(before[i].has_value() == after[i].has_value() && after[i].value_or(0) >= before[i].value_or(0),
                          "added detection lowered a grade in case " + std::to_string(c));
        }
    }

    std::size_t removals = 0;
    while (removals < 1000) {
        const SectionScene& scene = scenes[gen() % scenes.size()];
        const bool artery = gen() % 2;
        const auto kind = artery ? StructureClass::Kind::Artery : StructureClass::Kind::PeritubularCapillary;
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < scene.instances.size(); ++i) {
            if (scene.instances[i].cls.kind() == kind) idx.push_back(i);
        }
        if (idx.size() < 2) continue;
        SectionScene removed = scene;
        removed.instances.erase(removed.instances.begin() + static_cast<long>(idx[gen() % idx.size()]));
        const std::size_t slot = artery ? 2 : 1;
        const auto before = grades_of(score_section(scene))[slot];
        const auto after = grades_of(score_section(removed))[slot];
        check.require(after.has_value() && *after <= *before, "removal raised a max-type grade");
        ++removals;
    }

    SceneSpec spec;
    spec.canvas = {{0, 0}, {1024, 1024}};
    spec.layout.glomerulus.planted = {4, 0, 0, 0, 0};
    const SectionScene scene = generate_scene(spec).scene;
    SectionScene smaller = scene;
    std::erase_if(smaller.instances, [](const Instance& i) { return i.id == "glom-4"; });
    const auto g_before = value(score_section(scene).grade(Indicator::G));
    const auto g_after = value(score_section(smaller).grade(Indicator::G));
    check.require(g_before == 1 && g_after == 2, "removing an uninflamed glomerulus did not raise g");
    return check.outcome("1000 additions never lowered a grade; 1000 ptc/artery removals never raised ptc/v; "
                         "removing an uninflamed glomerulus raised g " + show(g_before) + " -> " + show(g_after));
}

}  // namespace

int main() {
    const fs::path work = fs::temp_directory_path() / "banff_acceptance";
    fs::remove_all(work);
    fs::create_directories(work);

    struct Criterion {
        int number;
        std::string title;
        double limit_seconds;  // 0: no runtime bound
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "g band sweep over rho = i/200", 1.0, g_band_sweep},
        {2, "ptc and v band sweep over counts 0..100", 1.0, count_band_sweep},
        {3, "\"more than three\" glomerulus threshold", 0, more_than_three},
        {4, "spatial assignment equals all-pairs oracle", 60.0, spatial_oracle},
        {5, "generator self-consistency over 100 seeds", 0, generator_consistency},
        {6, "omitting the only inflamed capillary: ptc 1 -> 0", 0, omitted_capillary},
        {7, "one hallucinated artery with one cell: v 0 -> 1", 0, hallucinated_artery},
        {8, "boundary flip of a 4-cell glomerulus", 0, boundary_flip},
        {9, "zero-noise end-to-end evaluation", 0, [&] { return zero_noise_evaluation(work); }},
        {10, "determinism of commands and parallel runs", 0, [&] { return determinism(work); }},
        {11, "translation, scaling and permutation invariance", 0, invariance},
        {12, "monotonicity suite", 0, monotonicity},
    };

    int failed = 0;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = c.run();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.limit_seconds > 0 && seconds >= c.limit_seconds) {
            outcome.pass = false;
            outcome.detail += " (runtime limit " + Json(c.limit_seconds).dump() + " s exceeded)";
        }
        if (!outcome.pass) ++failed;
        std::printf("%s [%2d] %s: %s (%.3f s)\n", outcome.pass ? "PASS" : "FAIL", c.number, c.title.c_str(),
                    outcome.detail.c_str(), seconds);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    fs::remove_all(work);
    return failed == 0 ? 0 : 1;
}
