#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "banff/ingest.hpp"
#include "banff/scene.hpp"
#include "banff/scoring.hpp"

namespace banff {

/// Value per scored structure class.
template <class T>
struct PerClass {
    T glomerulus{};
    T ptc{};
    T artery{};

    T& operator[](StructureClass::Kind kind) {
        switch (kind) {
            case StructureClass::Kind::Glomerulus: return glomerulus;
            case StructureClass::Kind::PeritubularCapillary: return ptc;
            default: return artery;
        }
    }
    const T& operator[](StructureClass::Kind kind) const {
        return const_cast<PerClass&>(*this)[kind];
    }
};

inline constexpr StructureClass::Kind kScoredKinds[] = {
    StructureClass::Kind::Glomerulus, StructureClass::Kind::PeritubularCapillary,
    StructureClass::Kind::Artery};

struct ClassLayout {
    /// Planted cell count per instance; its length is the instance count.
    std::vector<std::size_t> planted;
    /// Equivalent-radius range in pixels.
    double min_radius = 20.0;
    double max_radius = 40.0;
};

struct SceneSpec {
    std::string section_id = "synthetic";
    BoundingBox canvas{{0.0, 0.0}, {4096.0, 4096.0}};
    PerClass<ClassLayout> layout{{{}, 60.0, 110.0}, {{}, 8.0, 16.0}, {{}, 40.0, 90.0}};
    std::size_t background_cells = 0;
    std::uint64_t seed = 0;

    /// Throws SchemaViolation for inconsistent radii or an empty canvas.
    void validate() const;
};

struct GeneratedScene {
    SectionScene scene;
    /// Grades from the planted counts alone; absent for classes with no instances.
    GroundTruthGrades truth;
};

/// Places convex 12-24-gon ellipse approximations without overlap (bounding
/// circles kept apart), plants exactly the requested cells uniformly inside
/// each, and scatters background cells outside every instance. Deterministic
/// for a fixed spec. Throws PlacementFailure when placement exceeds its attempt cap.
GeneratedScene generate_scene(const SceneSpec& spec);

/// Grades computed directly from planted per-instance counts.
GroundTruthGrades grades_from_counts(const std::string& section_id, const PerClass<std::vector<std::size_t>>& counts);

struct HallucinationSpec {
    std::size_t count = 0;
    /// Each hallucinated instance draws its planted cell count uniformly from this list.
    std::vector<std::size_t> cell_counts{0};
    double min_radius = 20.0;
    double max_radius = 40.0;
};

struct PerturbationSpec {
    PerClass<double> omit_prob;
    /// Instances removed unconditionally during the omission step.
    std::set<std::string> omit_ids;
    PerClass<HallucinationSpec> hallucinate;
    double detection_fn_prob = 0.0;
    std::size_t detection_fp_count = 0;
    double jitter_sigma = 0.0;
    std::uint64_t seed = 0;
    /// Region for hallucinations and false positives; defaults to the scene's
    /// "canvas" metadata, then to the scene extent.
    std::optional<BoundingBox> canvas;

    /// Throws SchemaViolation for probabilities outside [0, 1] or negative sigma.
    void validate() const;
};

/// Applies, in order: instance omission, hallucination, detection dropout,
/// false-positive insertion, Gaussian jitter. Each step draws from its own
/// stream derived from `spec.seed`. An all-zero spec returns the input scene.
SectionScene perturb_scene(const SectionScene& scene, const PerturbationSpec& spec);

struct TrialOutcome {
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    /// Per indicator (g, ptc, v); empty when unscorable.
    std::array<std::optional<int>, 3> grades{};
};

struct IndicatorSensitivity {
    std::optional<int> baseline;
    /// Trials per grade 0..3, then unscorable.
    std::array<std::size_t, 5> histogram{};
    double flip_rate = 0.0;
    /// Mean |grade - baseline| over trials where both are scorable.
    double mean_abs_shift = 0.0;
    std::size_t shift_trials = 0;

    friend bool operator==(const IndicatorSensitivity&, const IndicatorSensitivity&) = default;
};

struct SensitivityReport {
    std::string section_id;
    std::size_t trials = 0;
    std::array<IndicatorSensitivity, 3> indicators{};
    std::vector<TrialOutcome> outcomes;
};

/// Trial t perturbs with seed derive_seed(spec.seed, t) and rescores. Results
/// do not depend on `threads`.
SensitivityReport sensitivity_run(const SectionScene& scene, const PerturbationSpec& spec,
                                  std::size_t trials, const ScoringConfig& config = {},
                                  std::size_t threads = 1);

// JSON documents -------------------------------------------------------------

SceneSpec scene_spec_from_json(const Json& doc);
Json scene_spec_to_json(const SceneSpec& spec);
PerturbationSpec perturbation_spec_from_json(const Json& doc);
Json perturbation_spec_to_json(const PerturbationSpec& spec);

/// Sorted-key JSON summary (no per-trial rows).
Json sensitivity_report_json(const SensitivityReport& report);
/// One row per trial: trial,seed,g,ptc,v with "U" for unscorable.
std::string sensitivity_csv(const SensitivityReport& report,
                            const std::map<std::string, std::string>& provenance = {});

/// Ground truth as a GeoJSON FeatureCollection with collection-level grade keys.
std::string write_ground_truth_geojson(const GroundTruthGrades& truth, const Json& extra_properties = Json::object());

}  // namespace banff
