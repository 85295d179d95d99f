#include "banff/render.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "banff/version.hpp"

namespace banff {

namespace {

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    std::string s = buf;
    if (s == "-0.00") s = "0.00";
    return s;
}

std::string xml_escape(std::string_view text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string comment_safe(std::string text) {
    for (std::size_t pos; (pos = text.find("--")) != std::string::npos;) text.replace(pos, 2, "- -");
    return text;
}

const char* structure_color(const StructureClass& cls) {
    switch (cls.kind()) {
        case StructureClass::Kind::Glomerulus: return Palette::glomerulus;
        case StructureClass::Kind::PeritubularCapillary: return Palette::ptc;
        case StructureClass::Kind::Artery: return Palette::artery;
        case StructureClass::Kind::Other: break;
    }
    return Palette::other_structure;
}

const char* cell_color(const CellClass& cls) {
    switch (cls.kind()) {
        case CellClass::Kind::Lymphocyte: return Palette::lymphocyte;
        case CellClass::Kind::Monocyte: return Palette::monocyte;
        case CellClass::Kind::Other: break;
    }
    return Palette::other_cell;
}

std::string ring_points(const Ring& ring) {
    std::string out;
    for (const Point2& p : ring.vertices()) {
        if (!out.empty()) out += ' ';
        out += num(p.x) + "," + num(p.y);
    }
    return out;
}

std::string ring_path(const Ring& ring) {
    std::string out;
    bool first = true;
    for (const Point2& p : ring.vertices()) {
        out += first ? "M" : " L";
        out += num(p.x) + " " + num(p.y);
        first = false;
    }
    return out + " Z";
}

std::map<std::string, std::size_t> report_counts(const ScoreReport& report) {
    std::map<std::string, std::size_t> counts;
    if (const auto* g = std::get_if<GScoreDetail>(&report.g)) {
        for (const GlomerulusEntry& e : g->per_glomerulus) counts[e.id] = e.count;
    }
    for (const MaxCountResult* r : {&report.ptc, &report.v}) {
        if (const auto* d = std::get_if<MaxCountDetail>(r)) {
            for (const InstanceCount& c : d->per_instance) counts[c.id] = c.count;
        }
    }
    return counts;
}

}  // namespace

std::string render_svg(const SectionScene& scene, const ScoreReport* report,
                       const std::map<std::string, std::string>& provenance) {
    BoundingBox canvas;
    if (auto c = scene_canvas(scene)) {
        canvas = *c;
    } else if (scene.instances.empty() && scene.detections.empty()) {
        canvas = {{0.0, 0.0}, {1024.0, 1024.0}};
    } else {
        const BoundingBox e = scene_extent(scene);
        canvas = {{e.min.x - 10.0, e.min.y - 10.0}, {e.max.x + 10.0, e.max.y + 10.0}};
    }
    const double w = std::max(canvas.width(), 1.0);
    const double h = std::max(canvas.height(), 1.0);
    const double marker = std::clamp(std::max(w, h) / 400.0, 1.0, 8.0);
    const double stroke = std::clamp(std::max(w, h) / 1000.0, 0.5, 4.0);

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<!-- " << kToolName << " " << kToolVersion << " -->\n";
    for (const auto& [k, v] : provenance) out << "<!-- " << comment_safe(k + ": " + v) << " -->\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w) << "\" height=\"" << num(h)
        << "\" viewBox=\"" << num(canvas.min.x) << " " << num(canvas.min.y) << " " << num(w) << " " << num(h)
        << "\">\n";
    out << "<title>" << xml_escape(scene.section_id) << "</title>\n";
    out << "<rect class=\"canvas\" x=\"" << num(canvas.min.x) << "\" y=\"" << num(canvas.min.y) << "\" width=\""
        << num(w) << "\" height=\"" << num(h) << "\" fill=\"#ffffff\" stroke=\"#000000\" stroke-width=\""
        << num(stroke) << "\"/>\n";

    out << "<g class=\"instances\" fill-opacity=\"0.25\" stroke-width=\"" << num(stroke) << "\">\n";
    for (const Instance& inst : scene.instances) {
        const char* color = structure_color(inst.cls);
        const std::string attrs = " data-id=\"" + xml_escape(inst.id) + "\" data-class=\"" +
                                  xml_escape(inst.cls.label()) + "\" fill=\"" + color + "\" stroke=\"" + color + "\"";
        if (inst.polygon.holes().empty()) {
            out << "<polygon" << attrs << " points=\"" << ring_points(inst.polygon.exterior()) << "\"/>\n";
        } else {
            std::string d = ring_path(inst.polygon.exterior());
            for (const Ring& hole : inst.polygon.holes()) d += " " + ring_path(hole);
            out << "<path" << attrs << " fill-rule=\"evenodd\" d=\"" << d << "\"/>\n";
        }
    }
    out << "</g>\n";

    out << "<g class=\"detections\">\n";
    for (const Detection& d : scene.detections) {
        out << "<circle data-id=\"" << xml_escape(d.id) << "\" cx=\"" << num(d.point.x) << "\" cy=\""
            << num(d.point.y) << "\" r=\"" << num(marker) << "\" fill=\"" << cell_color(d.cls) << "\"/>\n";
    }
    out << "</g>\n";

    if (report) {
        const auto counts = report_counts(*report);
        out << "<g class=\"labels\" font-family=\"sans-serif\" font-size=\"" << num(marker * 4.0)
            << "\" text-anchor=\"middle\">\n";
        for (const Instance& inst : scene.instances) {
            auto it = counts.find(inst.id);
            if (it == counts.end()) continue;
            const BoundingBox& b = inst.polygon.bbox();
            out << "<text data-id=\"" << xml_escape(inst.id) << "\" x=\"" << num((b.min.x + b.max.x) / 2.0)
                << "\" y=\"" << num(b.min.y - marker) << "\">" << it->second << "</text>\n";
        }
        out << "</g>\n";
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace banff
