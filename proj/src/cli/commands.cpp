#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "banff/cli.hpp"
#include "banff/errors.hpp"
#include "banff/evaluation.hpp"
#include "banff/random.hpp"
#include "banff/render.hpp"
#include "banff/report_io.hpp"
#include "banff/scene_io.hpp"
#include "banff/synth.hpp"
#include "banff/version.hpp"

namespace banff::cli {

namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------------------
// Files

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("file not found: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void require_exists(const fs::path& path) {
    if (!fs::is_regular_file(path)) throw InputError("file not found: " + path.string());
}

/// Runs fn, prefixing input errors with the file they came from.
template <class Fn>
auto from_file(const fs::path& path, Fn&& fn) {
    try {
        return fn(read_file(path));
    } catch (const DegenerateGeometry& e) {
        throw DegenerateGeometry(path.string() + ": " + e.what());
    } catch (const MalformedDocument& e) {
        throw MalformedDocument(path.string() + ": " + e.what());
    } catch (const SchemaViolation& e) {
        throw SchemaViolation(path.string() + ": " + e.what());
    } catch (const GradeOutOfRange& e) {
        throw GradeOutOfRange(path.string() + ": " + e.what());
    }
}

/// Collects outputs in memory and writes them only after the command has
/// succeeded, each through a temporary file and a rename.
class OutputSet {
public:
    explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}

    void add(const std::string& name, std::string content) {
        if (!names_.insert(name).second) throw InputError("two outputs would be written to " + name);
        files_.emplace_back(dir_ / name, std::move(content));
    }

    void commit(std::ostream& out) const {
        fs::create_directories(dir_);
        for (const auto& [path, content] : files_) {
            const fs::path tmp = path.string() + ".tmp";
            {
                std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
                if (!f) throw std::runtime_error("cannot write " + tmp.string());
                f << content;
                if (!f.flush()) throw std::runtime_error("cannot write " + tmp.string());
            }
            fs::rename(tmp, path);
            out << path.string() << "\n";
        }
    }

private:
    fs::path dir_;
    std::vector<std::pair<fs::path, std::string>> files_;
    std::set<std::string> names_;
};

std::string section_from_path(const fs::path& path) {
    std::string stem = path.filename().string();
    for (const char* ext : {".geojson", ".json"}) {
        if (stem.ends_with(ext)) {
            stem.resize(stem.size() - std::string_view(ext).size());
            break;
        }
    }
    for (const char* suffix : {".structures", ".scene"}) {
        if (stem.ends_with(suffix)) {
            stem.resize(stem.size() - std::string_view(suffix).size());
            break;
        }
    }
    return stem;
}

Json tool_json() { return {{"name", kToolName}, {"version", kToolVersion}}; }

Json config_json(const std::map<std::string, std::string>& config) {
    Json obj = Json::object();
    for (const auto& [k, v] : config) obj[k] = v;
    return obj;
}

std::map<std::string, std::string> provenance(const RunConfig& config) {
    std::map<std::string, std::string> p;
    p["tool"] = std::string(kToolName) + " " + std::string(kToolVersion);
    for (const auto& [k, v] : config.effective()) p["config." + k] = v;
    return p;
}

std::string dump(const Json& doc) { return doc.dump(1) + "\n"; }

// ---------------------------------------------------------------------------
// Flags

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    std::optional<std::string> min_confidence;
    std::optional<std::string> classes;
    std::optional<std::string> dedup_radius;
    std::optional<std::string> seed;
    std::optional<std::string> trials;
    std::optional<std::string> threads;
};

void add_common(CLI::App& sub, CommonFlags& f) {
    sub.add_option("--config", f.config_path, "Plain-text key = value config file");
    sub.add_option("--out-dir", f.out_dir, "Output directory");
    sub.add_option("--min-confidence", f.min_confidence, "Minimum detection confidence");
    sub.add_option("--classes", f.classes, "Comma-separated cell classes counted by every indicator");
    sub.add_option("--dedup-radius", f.dedup_radius, "Duplicate-suppression radius in pixels, or 'off'");
    sub.add_option("--seed", f.seed, "Seed override");
    sub.add_option("--trials", f.trials, "Sensitivity trials");
    sub.add_option("--threads", f.threads, "Worker threads");
}

RunConfig resolve_config(const CommonFlags& f) {
    RunConfig config;
    if (!f.config_path.empty()) {
        try {
            apply_config_file(config, f.config_path);
        } catch (const InputError& e) {
            throw SchemaViolation(f.config_path + ": " + e.what());
        }
    }
    if (f.min_confidence) config.apply("min_confidence", *f.min_confidence);
    if (f.classes) config.apply("classes", *f.classes);
    if (f.dedup_radius) config.apply("dedup_radius", *f.dedup_radius);
    if (f.seed) config.apply("seed", *f.seed);
    if (f.trials) config.apply("trials", *f.trials);
    if (f.threads) config.apply("threads", *f.threads);
    if (!f.out_dir.empty()) config.out_dir = f.out_dir;
    return config;
}

struct SceneInputs {
    std::vector<std::string> structures;
    std::vector<std::string> detections;
    std::vector<std::string> scenes;
};

void add_scene_inputs(CLI::App& sub, SceneInputs& in) {
    sub.add_option("--structures", in.structures, "Structure GeoJSON (repeatable, paired with --detections)");
    sub.add_option("--detections", in.detections, "Detection JSON (repeatable)");
    sub.add_option("--scene", in.scenes, "Scene interchange JSON (repeatable)");
}

std::vector<SectionScene> load_scenes(const SceneInputs& in, const RunConfig& config) {
    if (in.structures.size() != in.detections.size()) {
        throw InputError("--structures and --detections must be given the same number of times");
    }
    if (in.structures.empty() && in.scenes.empty()) {
        throw InputError("no input: pass --structures with --detections, or --scene");
    }
    for (const auto& p : in.structures) require_exists(p);
    for (const auto& p : in.detections) require_exists(p);
    for (const auto& p : in.scenes) require_exists(p);

    std::vector<SectionScene> scenes;
    for (std::size_t i = 0; i < in.structures.size(); ++i) {
        SectionScene scene;
        scene.section_id = section_from_path(in.structures[i]);
        scene.instances = from_file(in.structures[i], [&](const std::string& bytes) {
            return parse_structures(bytes, config.aliases);
        });
        // Every class and confidence is kept here; scoring applies its own filters.
        scene.detections = from_file(in.detections[i], [&](const std::string& bytes) {
            return parse_detections(bytes, DetectionFilter{0.0, std::nullopt}, config.aliases);
        });
        scenes.push_back(std::move(scene));
    }
    for (const auto& p : in.scenes) {
        scenes.push_back(from_file(p, [](const std::string& bytes) { return read_scene(bytes); }));
    }
    return scenes;
}

// ---------------------------------------------------------------------------
// score

int cmd_score(const CommonFlags& flags, const SceneInputs& inputs, std::ostream& out) {
    const RunConfig config = resolve_config(flags);
    const std::vector<SectionScene> scenes = load_scenes(inputs, config);
    ScoringConfig scoring = config.scoring;
    scoring.threads = config.threads;

    OutputSet outputs(config.out_dir);
    for (const SectionScene& scene : scenes) {
        ScoreReport report = score_section(scene, scoring);
        report.config = config.effective();
        outputs.add(scene.section_id + ".score.json", write_score_report(report));
    }
    outputs.commit(out);
    return 0;
}

// ---------------------------------------------------------------------------
// evaluate

struct ManifestRow {
    fs::path report;
    fs::path truth;
};

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') {
            quoted = !quoted;
        } else if (c == ',' && !quoted) {
            fields.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    fields.push_back(field);
    for (std::string& f : fields) {
        const auto b = f.find_first_not_of(" \t");
        const auto e = f.find_last_not_of(" \t");
        f = b == std::string::npos ? std::string{} : f.substr(b, e - b + 1);
    }
    return fields;
}

std::vector<ManifestRow> read_manifest(const fs::path& path) {
    const std::string text = read_file(path);
    const fs::path base = path.parent_path();
    std::vector<ManifestRow> rows;
    std::istringstream in(text);
    std::size_t line_no = 0;
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        const auto fields = split_csv_line(line);
        if (fields.size() == 1 && fields[0].empty()) continue;
        if (!fields[0].empty() && fields[0][0] == '#') continue;
        if (rows.empty() && fields[0] == "score_report") continue;  // header
        if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
            throw MalformedDocument(path.string() + " line " + std::to_string(line_no) +
                                    ": expected 'score_report,ground_truth'");
        }
        auto resolve = [&](const std::string& p) {
            const fs::path fp(p);
            return fp.is_absolute() ? fp : base / fp;
        };
        ManifestRow row{resolve(fields[0]), resolve(fields[1])};
        for (const fs::path& p : {row.report, row.truth}) {
            if (!fs::is_regular_file(p)) {
                throw InputError(path.string() + " line " + std::to_string(line_no) +
                                 ": file not found: " + p.string());
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

int cmd_evaluate(const CommonFlags& flags, const std::string& manifest, const std::vector<std::string>& reports,
                 const std::vector<std::string>& truths, std::ostream& out) {
    const RunConfig config = resolve_config(flags);
    if (reports.size() != truths.size()) throw InputError("--report and --gt must be given the same number of times");
    if (manifest.empty() && reports.empty()) throw InputError("evaluate needs --manifest or --report/--gt pairs");
    std::vector<ManifestRow> rows;
    if (!manifest.empty()) {
        require_exists(manifest);
        rows = read_manifest(manifest);
    }
    for (std::size_t i = 0; i < reports.size(); ++i) {
        require_exists(reports[i]);
        require_exists(truths[i]);
        rows.push_back({reports[i], truths[i]});
    }

    std::array<std::vector<GradePair>, 3> pairs;
    for (const ManifestRow& row : rows) {
        const ScoreReport report =
            from_file(row.report, [](const std::string& b) { return read_score_report(b); });
        const GroundTruthGrades truth =
            from_file(row.truth, [](const std::string& b) { return parse_ground_truth(b); });
        for (std::size_t i = 0; i < 3; ++i) {
            pairs[i].push_back({report.grade(kIndicators[i]), truth.get(kIndicators[i])});
        }
    }

    const auto prov = provenance(config);
    OutputSet outputs(config.out_dir);
    Json indicators = Json::object();
    for (std::size_t i = 0; i < 3; ++i) {
        const Indicator ind = kIndicators[i];
        const ConfusionMatrix cm = accumulate(pairs[i], ind);
        const std::string name(indicator_name(ind));
        outputs.add("confusion_" + name + ".csv", confusion_csv(cm, prov));

        Json matrix = Json::array();
        for (const auto& row : cm.cells) matrix.push_back(row);
        Json entry = {{"included", cm.n_sections}, {"excluded", cm.excluded}, {"matrix", std::move(matrix)}};
        if (cm.n_sections > 0) {
            const AgreementSummary s = summarize(cm);
            Json recall = Json::array();
            for (const auto& r : s.per_grade_recall) recall.push_back(r ? Json(*r) : Json(nullptr));
            entry["summary"] = {{"exact_agreement", s.exact_agreement},
                                {"within_one_agreement", s.within_one_agreement},
                                {"quadratic_weighted_kappa", s.quadratic_weighted_kappa},
                                {"per_grade_recall", std::move(recall)}};
        } else {
            entry["summary"] = nullptr;
            entry["note"] = "empty matrix: no section has both a predicted and an expert grade";
        }
        indicators[name] = std::move(entry);
    }
    const Json summary = {{"tool", tool_json()},
                          {"config", config_json(config.effective())},
                          {"orientation", "rows = expert grade, columns = predicted grade"},
                          {"sections", rows.size()},
                          {"indicators", std::move(indicators)}};
    outputs.add("summary.json", dump(summary));
    outputs.commit(out);
    return 0;
}

// ---------------------------------------------------------------------------
// synth

int cmd_synth(const CommonFlags& flags, const std::string& spec_path, std::ostream& out) {
    const RunConfig config = resolve_config(flags);
    if (spec_path.empty()) throw InputError("synth needs --spec");
    require_exists(spec_path);

    std::vector<SceneSpec> specs = from_file(spec_path, [](const std::string& bytes) {
        Json doc;
        try {
            doc = Json::parse(bytes);
        } catch (const Json::parse_error& e) {
            throw MalformedDocument(std::string("not valid JSON: ") + e.what());
        }
        std::vector<SceneSpec> out;
        if (doc.is_array()) {
            for (const Json& item : doc) out.push_back(scene_spec_from_json(item));
        } else {
            out.push_back(scene_spec_from_json(doc));
        }
        return out;
    });
    if (config.seed) {
        if (specs.size() == 1) {
            specs[0].seed = *config.seed;
        } else {
            for (std::size_t i = 0; i < specs.size(); ++i) specs[i].seed = derive_seed(*config.seed, i);
        }
    }

    const Json tool = tool_json();
    const Json cfg = config_json(config.effective());
    OutputSet outputs(config.out_dir);
    std::string manifest = "score_report,ground_truth\n";
    for (const SceneSpec& spec : specs) {
        GeneratedScene gen = generate_scene(spec);
        gen.scene.metadata["tool"] = tool;
        gen.scene.metadata["config"] = cfg;
        gen.scene.metadata["spec"] = scene_spec_to_json(spec);
        const std::string id = spec.section_id;
        const Json extra = {{"section_id", id}, {"tool", tool}, {"config", cfg}};
        outputs.add(id + ".scene.json", write_scene(gen.scene));
        outputs.add(id + ".structures.geojson", write_structures_geojson(gen.scene, extra));
        outputs.add(id + ".detections.json", write_detections_json(gen.scene, extra));
        outputs.add(id + ".gt.geojson", write_ground_truth_geojson(gen.truth, {{"tool", tool}, {"config", cfg}}));
        manifest += id + ".score.json," + id + ".gt.geojson\n";
    }
    outputs.add("manifest.csv", manifest);
    outputs.commit(out);
    return 0;
}

// ---------------------------------------------------------------------------
// sensitivity

struct SweepAxis {
    std::string key;
    std::vector<double> values;
};

SweepAxis parse_sweep(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw InputError("--sweep expects key=v1,v2,...");
    SweepAxis axis{text.substr(0, eq), {}};
    static const std::set<std::string> keys = {"fn_prob", "fp_count", "jitter_sigma", "omit_prob.glomerulus",
                                               "omit_prob.ptc", "omit_prob.artery"};
    if (!keys.contains(axis.key)) throw InputError("--sweep: unknown key '" + axis.key + "'");
    std::stringstream ss(text.substr(eq + 1));
    for (std::string item; std::getline(ss, item, ',');) {
        try {
            std::size_t used = 0;
            axis.values.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw InputError("--sweep: '" + item + "' is not a number");
        }
    }
    if (axis.values.empty()) throw InputError("--sweep lists no values");
    return axis;
}

PerturbationSpec with_sweep_value(PerturbationSpec spec, const std::string& key, double value) {
    if (key == "fn_prob") {
        spec.detection_fn_prob = value;
    } else if (key == "fp_count") {
        if (value < 0 || value != std::floor(value)) throw InputError("--sweep fp_count needs integers");
        spec.detection_fp_count = static_cast<std::size_t>(value);
    } else if (key == "jitter_sigma") {
        spec.jitter_sigma = value;
    } else if (key == "omit_prob.glomerulus") {
        spec.omit_prob.glomerulus = value;
    } else if (key == "omit_prob.ptc") {
        spec.omit_prob.ptc = value;
    } else if (key == "omit_prob.artery") {
        spec.omit_prob.artery = value;
    }
    spec.validate();
    return spec;
}

int cmd_sensitivity(const CommonFlags& flags, const SceneInputs& inputs, const std::string& spec_path,
                    const std::string& sweep, std::ostream& out) {
    const RunConfig config = resolve_config(flags);
    if (spec_path.empty()) throw InputError("sensitivity needs --spec");
    require_exists(spec_path);
    const std::vector<SectionScene> scenes = load_scenes(inputs, config);
    PerturbationSpec spec = from_file(spec_path, [](const std::string& bytes) {
        try {
            return perturbation_spec_from_json(Json::parse(bytes));
        } catch (const Json::parse_error& e) {
            throw MalformedDocument(std::string("not valid JSON: ") + e.what());
        }
    });
    if (config.seed) spec.seed = *config.seed;
    const std::optional<SweepAxis> axis = sweep.empty() ? std::nullopt : std::optional(parse_sweep(sweep));
    std::vector<PerturbationSpec> sweep_specs;
    if (axis) {
        for (double v : axis->values) sweep_specs.push_back(with_sweep_value(spec, axis->key, v));
    }

    const auto prov = provenance(config);
    OutputSet outputs(config.out_dir);
    for (const SectionScene& scene : scenes) {
        Json doc = {{"tool", tool_json()},
                    {"config", config_json(config.effective())},
                    {"perturbation", perturbation_spec_to_json(spec)}};
        if (!axis) {
            const SensitivityReport report =
                sensitivity_run(scene, spec, config.trials, config.scoring, config.threads);
            doc["report"] = sensitivity_report_json(report);
            outputs.add(scene.section_id + ".sensitivity.csv", sensitivity_csv(report, prov));
        } else {
            std::ostringstream csv;
            for (const auto& [k, v] : prov) csv << "# " << k << ": " << v << "\n";
            csv << axis->key << ",trials,g_flip_rate,ptc_flip_rate,v_flip_rate,g_mean_abs_shift,"
                << "ptc_mean_abs_shift,v_mean_abs_shift\n";
            Json points = Json::array();
            for (std::size_t k = 0; k < sweep_specs.size(); ++k) {
                const SensitivityReport report =
                    sensitivity_run(scene, sweep_specs[k], config.trials, config.scoring, config.threads);
                csv << Json(axis->values[k]).dump() << "," << report.trials;
                for (const auto& s : report.indicators) csv << "," << Json(s.flip_rate).dump();
                for (const auto& s : report.indicators) csv << "," << Json(s.mean_abs_shift).dump();
                csv << "\n";
                points.push_back({{"value", axis->values[k]}, {"report", sensitivity_report_json(report)}});
            }
            doc["sweep"] = {{"key", axis->key}, {"points", std::move(points)}};
            outputs.add(scene.section_id + ".sweep.csv", csv.str());
        }
        outputs.add(scene.section_id + ".sensitivity.json", dump(doc));
    }
    outputs.commit(out);
    return 0;
}

// ---------------------------------------------------------------------------
// render

int cmd_render(const CommonFlags& flags, const SceneInputs& inputs, const std::vector<std::string>& reports,
               std::ostream& out) {
    const RunConfig config = resolve_config(flags);
    for (const auto& p : reports) require_exists(p);
    const std::vector<SectionScene> scenes = load_scenes(inputs, config);
    if (!reports.empty() && reports.size() != scenes.size()) {
        throw InputError("--report must be given once per rendered section");
    }
    const auto prov = provenance(config);
    OutputSet outputs(config.out_dir);
    for (std::size_t i = 0; i < scenes.size(); ++i) {
        std::optional<ScoreReport> report;
        if (!reports.empty()) {
            report = from_file(reports[i], [](const std::string& b) { return read_score_report(b); });
        }
        outputs.add(scenes[i].section_id + ".svg", render_svg(scenes[i], report ? &*report : nullptr, prov));
    }
    outputs.commit(out);
    return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Banff lesion grading (g, ptc, v) from segmented structures and cell detections", "banff"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    CommonFlags score_flags, eval_flags, synth_flags, sens_flags, render_flags;
    SceneInputs score_inputs, sens_inputs, render_inputs;
    std::string manifest, synth_spec, sens_spec, sweep;
    std::vector<std::string> render_reports, eval_reports, eval_truths;

    CLI::App* score = app.add_subcommand("score", "Grade sections and write <section>.score.json");
    add_common(*score, score_flags);
    add_scene_inputs(*score, score_inputs);

    CLI::App* evaluate = app.add_subcommand("evaluate", "Confusion matrices and agreement from a manifest");
    add_common(*evaluate, eval_flags);
    evaluate->add_option("--manifest", manifest, "CSV of score_report,ground_truth path pairs");
    evaluate->add_option("--report", eval_reports, "Score report (repeatable, paired with --gt)");
    evaluate->add_option("--gt", eval_truths, "Ground-truth GeoJSON (repeatable)");

    CLI::App* synth = app.add_subcommand("synth", "Generate synthetic scenes with known grades");
    add_common(*synth, synth_flags);
    synth->add_option("--spec", synth_spec, "Scene spec JSON (object or array)");

    CLI::App* sensitivity = app.add_subcommand("sensitivity", "Grade-flip statistics under injected errors");
    add_common(*sensitivity, sens_flags);
    add_scene_inputs(*sensitivity, sens_inputs);
    sensitivity->add_option("--spec", sens_spec, "Perturbation spec JSON");
    sensitivity->add_option("--sweep", sweep, "Sweep one parameter: key=v1,v2,...");

    CLI::App* render = app.add_subcommand("render", "SVG overlay of a scene");
    add_common(*render, render_flags);
    add_scene_inputs(*render, render_inputs);
    render->add_option("--report", render_reports, "Score report for count labels (repeatable)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << kToolVersion << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (score->parsed()) return cmd_score(score_flags, score_inputs, out);
        if (evaluate->parsed()) return cmd_evaluate(eval_flags, manifest, eval_reports, eval_truths, out);
        if (synth->parsed()) return cmd_synth(synth_flags, synth_spec, out);
        if (sensitivity->parsed()) return cmd_sensitivity(sens_flags, sens_inputs, sens_spec, sweep, out);
        if (render->parsed()) return cmd_render(render_flags, render_inputs, render_reports, out);
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace banff::cli
