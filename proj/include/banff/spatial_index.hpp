#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "banff/geometry.hpp"
#include "banff/scene.hpp"

namespace banff {

/// Uniform grid over instance bounding boxes. Immutable once built.
///
/// A candidate query returns every instance whose (closed) bounding box
/// contains the point, in ascending instance order. That is a superset of the
/// instances whose polygon contains the point.
class SpatialIndex {
public:
    SpatialIndex() = default;
    SpatialIndex(std::vector<std::string> ids, std::vector<BoundingBox> boxes);

    std::size_t size() const { return ids_.size(); }
    bool empty() const { return ids_.empty(); }
    std::span<const std::string> ids() const { return ids_; }

    std::vector<std::size_t> candidates(Point2 p) const;

    template <class Visitor>
    void for_each_candidate(Point2 p, Visitor&& visit) const {
        if (ids_.empty() || !extent_.contains(p)) return;
        const std::size_t cell = cell_of(p);
        for (std::size_t k = cell_start_[cell]; k < cell_start_[cell + 1]; ++k) {
            const std::size_t idx = cell_items_[k];
            if (boxes_[idx].contains(p)) visit(idx);
        }
    }

private:
    std::size_t cell_of(Point2 p) const;

    std::vector<std::string> ids_;
    std::vector<BoundingBox> boxes_;
    BoundingBox extent_;
    std::size_t cols_ = 0;
    std::size_t rows_ = 0;
    double cell_w_ = 1.0;
    double cell_h_ = 1.0;
    // CSR layout: items of cell c are cell_items_[cell_start_[c] .. cell_start_[c+1]).
    std::vector<std::size_t> cell_start_;
    std::vector<std::size_t> cell_items_;
};

SpatialIndex build_index(std::span<const Instance> instances);

struct InstanceHits {
    std::string id;
    std::size_t count = 0;
    /// Contained detection ids in detection input order.
    std::vector<std::string> detection_ids;

    friend bool operator==(const InstanceHits&, const InstanceHits&) = default;
};

struct AssignmentTable {
    /// One entry per instance, in instance input order.
    std::vector<InstanceHits> per_instance;
    /// Ids of detections that lie in no instance, in detection input order.
    std::vector<std::string> unassigned;

    const InstanceHits* find(const std::string& instance_id) const;

    friend bool operator==(const AssignmentTable&, const AssignmentTable&) = default;
};

struct AssignOptions {
    /// Worker threads for the containment pass; 0 or 1 runs inline. The table
    /// is identical for every thread count.
    std::size_t threads = 1;
};

/// Counts each detection in every instance whose polygon contains it
/// (boundary-inclusive). Throws IndexMismatch when the index was not built over
/// exactly these instances in this order.
AssignmentTable assign_detections(std::span<const Detection> detections,
                                  std::span<const Instance> instances, const SpatialIndex& index,
                                  const AssignOptions& options = {});

}  // namespace banff
