#include "banff/report_io.hpp"

#include "banff/errors.hpp"
#include "banff/version.hpp"

namespace banff {

namespace {

Json unscorable_json(const Unscorable& u) { return {{"status", "unscorable"}, {"reason", u.reason}}; }

Json g_json(const GResult& result) {
    if (const auto* u = std::get_if<Unscorable>(&result)) return unscorable_json(*u);
    const auto& d = std::get<GScoreDetail>(result);
    Json per = Json::array();
    for (const GlomerulusEntry& e : d.per_glomerulus) {
        per.push_back({{"id", e.id}, {"count", e.count}, {"inflamed", e.inflamed}});
    }
    return {{"status", "scored"},
            {"grade", d.grade.value()},
            {"n_glomeruli", d.n_glomeruli},
            {"n_inflamed", d.n_inflamed},
            {"rho_g", d.rho_g()},
            {"rho_g_fraction", std::to_string(d.n_inflamed) + "/" + std::to_string(d.n_glomeruli)},
            {"inflamed_threshold", kInflamedGlomerulusThreshold},
            {"per_instance", std::move(per)}};
}

Json max_json(const MaxCountResult& result) {
    if (const auto* u = std::get_if<Unscorable>(&result)) return unscorable_json(*u);
    const auto& d = std::get<MaxCountDetail>(result);
    Json per = Json::array();
    for (const InstanceCount& c : d.per_instance) per.push_back({{"id", c.id}, {"count", c.count}});
    return {{"status", "scored"},
            {"grade", d.grade.value()},
            {"max_count", d.max_count},
            {"per_instance", std::move(per)}};
}

const Json& field(const Json& obj, const char* key, std::string_view where) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw MalformedDocument(std::string(where) + " is missing \"" + key + "\"");
    }
    return *it;
}

std::optional<Unscorable> read_status(const Json& obj, std::string_view where) {
    const std::string status = field(obj, "status", where).get<std::string>();
    if (status == "unscorable") return Unscorable{obj.value("reason", "")};
    if (status != "scored") throw MalformedDocument(std::string(where) + ": unknown status '" + status + "'");
    return std::nullopt;
}

GResult read_g(const Json& obj) {
    if (auto u = read_status(obj, "g")) return *u;
    GScoreDetail d;
    d.grade = BanffGrade(field(obj, "grade", "g").get<int>());
    d.n_glomeruli = field(obj, "n_glomeruli", "g").get<std::size_t>();
    d.n_inflamed = field(obj, "n_inflamed", "g").get<std::size_t>();
    for (const Json& e : field(obj, "per_instance", "g")) {
        d.per_glomerulus.push_back({e.at("id").get<std::string>(), e.at("count").get<std::size_t>(),
                                    e.at("inflamed").get<bool>()});
    }
    return d;
}

MaxCountResult read_max(const Json& obj, std::string_view where) {
    if (auto u = read_status(obj, where)) return *u;
    MaxCountDetail d;
    d.grade = BanffGrade(field(obj, "grade", where).get<int>());
    d.max_count = field(obj, "max_count", where).get<std::size_t>();
    for (const Json& e : field(obj, "per_instance", where)) {
        d.per_instance.push_back({e.at("id").get<std::string>(), e.at("count").get<std::size_t>()});
    }
    return d;
}

}  // namespace

std::string write_score_report(const ScoreReport& report) {
    Json config = Json::object();
    for (const auto& [k, v] : report.config) config[k] = v;
    Json doc = {{"section_id", report.section_id},
                {"tool", {{"name", kToolName}, {"version", kToolVersion}}},
                {"config", std::move(config)},
                {"g", g_json(report.g)},
                {"ptc", max_json(report.ptc)},
                {"v", max_json(report.v)}};
    return doc.dump(1) + "\n";
}

ScoreReport read_score_report(std::string_view bytes) {
    Json doc;
    try {
        doc = Json::parse(bytes.begin(), bytes.end());
    } catch (const Json::parse_error& e) {
        throw MalformedDocument(std::string("score report is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw MalformedDocument("score report is not a JSON object");
    try {
        ScoreReport r;
        r.section_id = field(doc, "section_id", "score report").get<std::string>();
        if (auto c = doc.find("config"); c != doc.end() && c->is_object()) {
            for (auto it = c->begin(); it != c->end(); ++it) {
                r.config[it.key()] = it->is_string() ? it->get<std::string>() : it->dump();
            }
        }
        r.g = read_g(field(doc, "g", "score report"));
        r.ptc = read_max(field(doc, "ptc", "score report"), "ptc");
        r.v = read_max(field(doc, "v", "score report"), "v");
        return r;
    } catch (const Json::exception& e) {
        throw MalformedDocument(std::string("score report: ") + e.what());
    }
}

}  // namespace banff
