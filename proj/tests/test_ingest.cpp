#include <gtest/gtest.h>

#include "banff/errors.hpp"
#include "banff/ingest.hpp"

using namespace banff;

namespace {

const char* kStructures = R"({
  "type": "FeatureCollection",
  "features": [
    {"type": "Feature", "id": "g1",
     "geometry": {"type": "Polygon", "coordinates": [[[0,0],[10,0],[10,10],[0,10],[0,0]]]},
     "properties": {"classification": {"name": "Glomerular Tuft"}}},
    {"type": "Feature",
     "geometry": {"type": "Polygon", "coordinates": [[[20,0],[30,0],[30,10],[20,10]], [[22,2],[24,2],[24,4],[22,4]]]},
     "properties": {"id": "p1", "class": "PTC"}},
    {"type": "Feature",
     "geometry": {"type": "MultiPolygon", "coordinates": [
        [[[40,0],[50,0],[50,10],[40,10],[40,0]]],
        [[[60,0],[70,0],[70,10],[60,10],[60,0]]]]},
     "properties": {"id": "a1", "classification": {"name": "arterial"}}},
    {"type": "Feature",
     "geometry": {"type": "Polygon", "coordinates": [[[0,20],[5,20],[5,25],[0,20]]]},
     "properties": {"classification": {"name": "tubule"}}}
  ]
})";

std::string detections_doc(const std::string& points) { return R"({"points": [)" + points + "]}"; }

}  // namespace

TEST(AliasTable, NormalizesLabels) {
    const AliasTable a = AliasTable::defaults();
    EXPECT_EQ(a.structure("  Glomerulus "), StructureClass::glomerulus());
    EXPECT_EQ(a.structure("Peritubular Capillary"), StructureClass::peritubular_capillary());
    EXPECT_EQ(a.structure("ARTERY"), StructureClass::artery());
    EXPECT_EQ(a.structure("tubule").kind(), StructureClass::Kind::Other);
    EXPECT_EQ(a.cell("Lymphocyte"), CellClass::lymphocyte());
    EXPECT_EQ(a.cell("neutrophil").kind(), CellClass::Kind::Other);
}

TEST(ParseStructures, ReadsIdsClassesHolesAndMultiPolygons) {
    const auto inst = parse_structures(kStructures, AliasTable::defaults());
    ASSERT_EQ(inst.size(), 5u);
    EXPECT_EQ(inst[0].id, "g1");
    EXPECT_EQ(inst[0].cls, StructureClass::glomerulus());
    EXPECT_EQ(inst[0].polygon.exterior().size(), 4u);
    EXPECT_EQ(inst[1].id, "p1");
    EXPECT_EQ(inst[1].cls, StructureClass::peritubular_capillary());
    EXPECT_EQ(inst[1].polygon.holes().size(), 1u);
    EXPECT_EQ(inst[2].id, "a1#0");
    EXPECT_EQ(inst[3].id, "a1#1");
    EXPECT_EQ(inst[3].cls, StructureClass::artery());
    EXPECT_EQ(inst[4].id, "feature-3");
    EXPECT_EQ(inst[4].cls.kind(), StructureClass::Kind::Other);
}

TEST(ParseStructures, CustomAliasMapsLabel) {
    AliasTable a = AliasTable::defaults();
    a.set_structure("tubule", StructureClass::artery());
    const auto inst = parse_structures(kStructures, a);
    EXPECT_EQ(inst[4].cls, StructureClass::artery());
}

TEST(ParseStructures, DegenerateRingNamesFeature) {
    const std::string doc = R"({"type":"FeatureCollection","features":[{"type":"Feature","id":"bad",
      "geometry":{"type":"Polygon","coordinates":[[[0,0],[1,1],[2,2],[0,0]]]},"properties":{}}]})";
    try {
        parse_structures(doc, AliasTable::defaults());
        FAIL();
    } catch (const DegenerateGeometry& e) {
        EXPECT_NE(std::string(e.what()).find("bad"), std::string::npos);
    }
}

TEST(ParseStructures, SelfIntersectionIsRejected) {
    const std::string doc = R"({"type":"FeatureCollection","features":[{"type":"Feature","id":"bow",
      "geometry":{"type":"Polygon","coordinates":[[[0,0],[2,2],[2,0],[0,2],[0,0]]]},"properties":{}}]})";
    EXPECT_THROW(parse_structures(doc, AliasTable::defaults()), DegenerateGeometry);
}

TEST(ParseStructures, MalformedDocuments) {
    EXPECT_THROW(parse_structures("{not json", AliasTable::defaults()), MalformedDocument);
    EXPECT_THROW(parse_structures(R"({"type":"FeatureCollection"})", AliasTable::defaults()), MalformedDocument);
    const std::string dup = R"({"type":"FeatureCollection","features":[
      {"type":"Feature","id":"x","geometry":{"type":"Polygon","coordinates":[[[0,0],[1,0],[1,1]]]}},
      {"type":"Feature","id":"x","geometry":{"type":"Polygon","coordinates":[[[0,0],[1,0],[1,1]]]}}]})";
    EXPECT_THROW(parse_structures(dup, AliasTable::defaults()), MalformedDocument);
    const std::string line = R"({"type":"FeatureCollection","features":[
      {"type":"Feature","id":"l","geometry":{"type":"LineString","coordinates":[[0,0],[1,0]]}}]})";
    EXPECT_THROW(parse_structures(line, AliasTable::defaults()), MalformedDocument);
}

TEST(ParseDetections, FiltersByConfidenceAndClass) {
    const auto doc = detections_doc(R"(
      {"name": "lymphocyte", "point": [1, 2], "probability": 0.9},
      {"name": "Monocyte", "point": [3, 4], "probability": 0.5},
      {"name": "lymphocyte", "point": [5, 6], "probability": 0.49},
      {"name": "neutrophil", "point": [7, 8], "probability": 1.0},
      {"name": "lymphocyte", "point": [9, 10]})");
    const auto kept = parse_detections(doc, DetectionFilter{});
    ASSERT_EQ(kept.size(), 3u);
    EXPECT_EQ(kept[0].id, "d0");
    EXPECT_EQ(kept[1].id, "d1");
    EXPECT_EQ(kept[1].cls, CellClass::monocyte());
    EXPECT_EQ(kept[2].id, "d4");
    EXPECT_DOUBLE_EQ(kept[2].confidence, 1.0);

    const auto all = parse_detections(doc, DetectionFilter{0.0, std::nullopt});
    EXPECT_EQ(all.size(), 5u);
    EXPECT_EQ(all[3].cls.kind(), CellClass::Kind::Other);
}

TEST(ParseDetections, SchemaViolations) {
    EXPECT_THROW(parse_detections(R"({"cells": []})", {}), SchemaViolation);
    EXPECT_THROW(parse_detections(detections_doc(R"({"point": [1, 2]})"), {}), SchemaViolation);
    EXPECT_THROW(parse_detections(detections_doc(R"({"name": "lymphocyte"})"), {}), SchemaViolation);
    EXPECT_THROW(parse_detections(detections_doc(R"({"name": "lymphocyte", "point": [1, 2], "probability": 1.5})"), {}),
                 SchemaViolation);
    EXPECT_THROW(parse_detections("[", {}), MalformedDocument);
}

TEST(ParseGroundTruth, CollectionLevelWins) {
    const auto gt = parse_ground_truth(R"({"type":"FeatureCollection",
      "properties":{"section_id":"s1","banff_g":2,"banff_ptc":"1"},
      "features":[{"type":"Feature","properties":{"banff_g":3,"banff_v":1}},
                  {"type":"Feature","properties":{"banff_v":2}}]})");
    EXPECT_EQ(gt.section_id, "s1");
    EXPECT_EQ(gt.g, BanffGrade(2));
    EXPECT_EQ(gt.ptc, BanffGrade(1));
    EXPECT_EQ(gt.v, BanffGrade(2));
}

TEST(ParseGroundTruth, MissingGradeIsEmpty) {
    const auto gt = parse_ground_truth(R"({"banff_g": 0})");
    EXPECT_EQ(gt.g, BanffGrade(0));
    EXPECT_FALSE(gt.ptc.has_value());
    EXPECT_FALSE(gt.v.has_value());
}

TEST(ParseGroundTruth, OutOfRangeGrades) {
    EXPECT_THROW(parse_ground_truth(R"({"banff_g": 4})"), GradeOutOfRange);
    EXPECT_THROW(parse_ground_truth(R"({"banff_g": -1})"), GradeOutOfRange);
    EXPECT_THROW(parse_ground_truth(R"({"banff_g": 1.5})"), GradeOutOfRange);
    EXPECT_THROW(parse_ground_truth(R"({"banff_g": "x"})"), MalformedDocument);
}

TEST(Dedup, KeepsHighestConfidenceWithinRadius) {
    const std::vector<Detection> dets = {{"a", {0, 0}, CellClass::lymphocyte(), 0.7},
                                         {"b", {1, 0}, CellClass::lymphocyte(), 0.9},
                                         {"c", {1, 0}, CellClass::monocyte(), 0.8},
                                         {"d", {10, 0}, CellClass::lymphocyte(), 0.6}};
    const auto out = dedup_detections(dets, 2.0);
    ASSERT_EQ(out.size(), 3u);
    EXPECT_EQ(out[0].id, "b");
    EXPECT_EQ(out[1].id, "c");
    EXPECT_EQ(out[2].id, "d");
}

TEST(Dedup, ZeroRadiusRemovesExactDuplicatesOnly) {
    const std::vector<Detection> dets = {{"a", {0, 0}, CellClass::lymphocyte(), 0.7},
                                         {"b", {0, 0}, CellClass::lymphocyte(), 0.7},
                                         {"c", {0, 1e-9}, CellClass::lymphocyte(), 0.7}};
    const auto out = dedup_detections(dets, 0.0);
    ASSERT_EQ(out.size(), 2u);
    EXPECT_EQ(out[0].id, "a");
    EXPECT_EQ(out[1].id, "c");
}

TEST(Dedup, GridMatchesBruteForce) {
    std::vector<Detection> dets;
    for (int k = 0; k < 2000; ++k) {
        const double x = (k * 7919 % 997) / 10.0, y = (k * 104729 % 991) / 10.0;
        dets.push_back({"d" + std::to_string(k), {x, y}, CellClass::lymphocyte(), (k % 17) / 17.0});
    }
    const double r = 1.5;
    const auto got = dedup_detections(dets, r);
    // Greedy reference: visit by confidence desc then id, keep when no kept point lies within r.
    std::vector<std::size_t> order(dets.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (dets[a].confidence != dets[b].confidence) return dets[a].confidence > dets[b].confidence;
        if (dets[a].id != dets[b].id) return dets[a].id < dets[b].id;
        return a < b;
    });
    std::vector<bool> keep(dets.size(), false);
    std::vector<std::size_t> kept;
    for (std::size_t i : order) {
        bool clear = true;
        for (std::size_t j : kept) {
            const double dx = dets[i].point.x - dets[j].point.x, dy = dets[i].point.y - dets[j].point.y;
            if (dx * dx + dy * dy <= r * r) clear = false;
        }
        if (clear) {
            kept.push_back(i);
            keep[i] = true;
        }
    }
    std::vector<std::string> want;
    for (std::size_t i = 0; i < dets.size(); ++i) {
        if (keep[i]) want.push_back(dets[i].id);
    }
    std::vector<std::string> have;
    for (const auto& d : got) have.push_back(d.id);
    EXPECT_EQ(have, want);
}
