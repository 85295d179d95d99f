#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "banff/cli.hpp"
#include "banff/errors.hpp"

namespace banff::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used == value.size() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    throw SchemaViolation("config " + key + ": '" + value + "' is not a number");
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        if (!value.empty() && value[0] != '-') {
            const unsigned long long v = std::stoull(value, &used);
            if (used == value.size()) return v;
        }
    } catch (const std::exception&) {
    }
    throw SchemaViolation("config " + key + ": '" + value + "' is not a non-negative integer");
}

CellClassSet parse_classes(const std::string& key, const std::string& value, const AliasTable& aliases) {
    CellClassSet out;
    std::stringstream ss(value);
    for (std::string item; std::getline(ss, item, ',');) {
        item = trim(item);
        if (item.empty()) continue;
        const std::string norm = AliasTable::normalize(item);
        auto alias = aliases.cell_aliases().find(norm);
        out.insert(alias != aliases.cell_aliases().end() ? alias->second : CellClass::from_label(item));
    }
    if (out.empty()) throw SchemaViolation("config " + key + " lists no cell classes");
    return out;
}

}  // namespace

void RunConfig::apply(const std::string& key, const std::string& value) {
    if (key == "min_confidence") {
        const double v = parse_double(key, value);
        if (v < 0.0 || v > 1.0) throw SchemaViolation("config min_confidence must lie in [0, 1]");
        scoring.min_confidence = v;
    } else if (key == "classes") {
        scoring.g_classes = scoring.ptc_classes = scoring.v_classes = parse_classes(key, value, aliases);
    } else if (key == "g_classes") {
        scoring.g_classes = parse_classes(key, value, aliases);
    } else if (key == "ptc_classes") {
        scoring.ptc_classes = parse_classes(key, value, aliases);
    } else if (key == "v_classes") {
        scoring.v_classes = parse_classes(key, value, aliases);
    } else if (key == "dedup_radius") {
        if (value == "off" || value.empty()) {
            scoring.dedup_radius.reset();
        } else {
            const double r = parse_double(key, value);
            if (r < 0.0) throw SchemaViolation("config dedup_radius must be >= 0");
            scoring.dedup_radius = r;
        }
    } else if (key == "seed") {
        seed = parse_unsigned(key, value);
    } else if (key == "trials") {
        trials = parse_unsigned(key, value);
        if (trials == 0) throw SchemaViolation("config trials must be >= 1");
    } else if (key == "threads") {
        threads = std::max<std::size_t>(1, parse_unsigned(key, value));
    } else if (key == "out_dir") {
        out_dir = value;
    } else if (key.starts_with("structure_alias.")) {
        const std::string label = key.substr(std::string("structure_alias.").size());
        const StructureClass cls = StructureClass::from_label(AliasTable::normalize(value));
        if (!cls.is_scored()) {
            throw SchemaViolation("config " + key + ": '" + value + "' is not glomerulus, ptc or artery");
        }
        aliases.set_structure(label, cls);
    } else if (key.starts_with("cell_alias.")) {
        const std::string label = key.substr(std::string("cell_alias.").size());
        const CellClass cls = CellClass::from_label(AliasTable::normalize(value));
        if (cls.kind() == CellClass::Kind::Other) {
            throw SchemaViolation("config " + key + ": '" + value + "' is not lymphocyte or monocyte");
        }
        aliases.set_cell(label, cls);
    } else {
        throw SchemaViolation("unknown config key '" + key + "'");
    }
}

std::map<std::string, std::string> RunConfig::effective() const {
    std::map<std::string, std::string> out = scoring.snapshot();
    out["seed"] = seed ? std::to_string(*seed) : "none";
    out["trials"] = std::to_string(trials);
    for (const auto& [label, cls] : aliases.structure_aliases()) out["structure_alias." + label] = cls.label();
    for (const auto& [label, cls] : aliases.cell_aliases()) out["cell_alias." + label] = cls.label();
    return out;
}

std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> out;
    std::istringstream in(text);
    std::size_t line_no = 0;
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw MalformedDocument("config line " + std::to_string(line_no) + " has no '='");
        }
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw MalformedDocument("config line " + std::to_string(line_no) + " has no key");
        out.emplace_back(key, trim(line.substr(eq + 1)));
    }
    return out;
}

void apply_config_file(RunConfig& config, const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("file not found: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    const auto entries = parse_config_text(buf.str());
    auto is_alias = [](const std::string& k) {
        return k.starts_with("structure_alias.") || k.starts_with("cell_alias.");
    };
    for (const auto& [k, v] : entries) {
        if (is_alias(k)) config.apply(k, v);
    }
    for (const auto& [k, v] : entries) {
        if (!is_alias(k)) config.apply(k, v);
    }
}

}  // namespace banff::cli
