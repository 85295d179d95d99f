#include "banff/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <utility>

#include "banff/errors.hpp"

namespace banff {

namespace {
constexpr std::size_t kMaxCellsPerAxis = 4096;
}

SpatialIndex::SpatialIndex(std::vector<std::string> ids, std::vector<BoundingBox> boxes)
    : ids_(std::move(ids)), boxes_(std::move(boxes)) {
    if (ids_.size() != boxes_.size()) throw IndexMismatch("index ids and boxes differ in length");
    const std::size_t n = boxes_.size();
    if (n == 0) return;

    extent_ = boxes_.front();
    double sum_w = 0.0;
    double sum_h = 0.0;
    for (const BoundingBox& b : boxes_) {
        extent_ = merge(extent_, b);
        sum_w += b.width();
        sum_h += b.height();
    }
    const double ext_w = extent_.width();
    const double ext_h = extent_.height();
    const double mean_w = sum_w / static_cast<double>(n);
    const double mean_h = sum_h / static_cast<double>(n);

    // Cells roughly the size of an average box, with the total capped near 4n.
    auto axis_cells = [](double extent, double mean) -> double {
        if (!(extent > 0.0) || !(mean > 0.0)) return 1.0;
        return std::clamp(std::ceil(extent / mean), 1.0, static_cast<double>(kMaxCellsPerAxis));
    };
    double cols = axis_cells(ext_w, mean_w);
    double rows = axis_cells(ext_h, mean_h);
    const double budget = 4.0 * static_cast<double>(n) + 16.0;
    if (cols * rows > budget) {
        const double shrink = std::sqrt(budget / (cols * rows));
        cols = std::max(1.0, std::floor(cols * shrink));
        rows = std::max(1.0, std::floor(rows * shrink));
    }
    cols_ = static_cast<std::size_t>(cols);
    rows_ = static_cast<std::size_t>(rows);
    cell_w_ = ext_w > 0.0 ? ext_w / cols : 1.0;
    cell_h_ = ext_h > 0.0 ? ext_h / rows : 1.0;

    // Cell ranges come from cell_of on the box corners. cell_of is monotone in
    // each coordinate, so every point inside a box maps into its range.
    std::vector<std::size_t> counts(cols_ * rows_ + 1, 0);
    auto for_cells = [&](const BoundingBox& b, auto&& fn) {
        const std::size_t c0 = cell_of(b.min);
        const std::size_t c1 = cell_of(b.max);
        const std::size_t x0 = c0 % cols_, y0 = c0 / cols_;
        const std::size_t x1 = c1 % cols_, y1 = c1 / cols_;
        for (std::size_t y = y0; y <= y1; ++y) {
            for (std::size_t x = x0; x <= x1; ++x) fn(y * cols_ + x);
        }
    };
    for (const BoundingBox& b : boxes_) for_cells(b, [&](std::size_t c) { ++counts[c + 1]; });
    for (std::size_t c = 1; c < counts.size(); ++c) counts[c] += counts[c - 1];
    cell_start_ = std::move(counts);
    cell_items_.resize(cell_start_.back());
    std::vector<std::size_t> fill(cell_start_.begin(), cell_start_.end() - 1);
    for (std::size_t i = 0; i < n; ++i) {
        for_cells(boxes_[i], [&](std::size_t c) { cell_items_[fill[c]++] = i; });
    }
}

std::size_t SpatialIndex::cell_of(Point2 p) const {
    auto axis = [](double v, double lo, double size, std::size_t cells) -> std::size_t {
        const double f = std::floor((v - lo) / size);
        if (!(f > 0.0)) return 0;
        return std::min(cells - 1, static_cast<std::size_t>(f));
    };
    return axis(p.y, extent_.min.y, cell_h_, rows_) * cols_ + axis(p.x, extent_.min.x, cell_w_, cols_);
}

std::vector<std::size_t> SpatialIndex::candidates(Point2 p) const {
    std::vector<std::size_t> out;
    for_each_candidate(p, [&](std::size_t i) { out.push_back(i); });
    return out;
}

SpatialIndex build_index(std::span<const Instance> instances) {
    std::vector<std::string> ids;
    std::vector<BoundingBox> boxes;
    ids.reserve(instances.size());
    boxes.reserve(instances.size());
    for (const Instance& inst : instances) {
        ids.push_back(inst.id);
        boxes.push_back(inst.polygon.bbox());
    }
    return SpatialIndex(std::move(ids), std::move(boxes));
}

const InstanceHits* AssignmentTable::find(const std::string& instance_id) const {
    for (const InstanceHits& h : per_instance) {
        if (h.id == instance_id) return &h;
    }
    return nullptr;
}

namespace {

struct Hit {
    std::size_t detection;
    std::size_t instance;
};

struct ChunkResult {
    std::vector<Hit> hits;
    std::vector<std::size_t> unassigned;
};

ChunkResult assign_range(std::span<const Detection> detections, std::size_t begin, std::size_t end,
                         std::span<const Instance> instances, const SpatialIndex& index) {
    ChunkResult r;
    for (std::size_t d = begin; d < end; ++d) {
        const Point2 p = detections[d].point;
        bool any = false;
        index.for_each_candidate(p, [&](std::size_t i) {
            if (point_in_polygon(p, instances[i].polygon)) {
                r.hits.push_back({d, i});
                any = true;
            }
        });
        if (!any) r.unassigned.push_back(d);
    }
    return r;
}

}  // namespace

AssignmentTable assign_detections(std::span<const Detection> detections,
                                  std::span<const Instance> instances, const SpatialIndex& index,
                                  const AssignOptions& options) {
    if (index.size() != instances.size()) {
        throw IndexMismatch("index covers " + std::to_string(index.size()) + " instances, " +
                            std::to_string(instances.size()) + " given");
    }
    for (std::size_t i = 0; i < instances.size(); ++i) {
        if (index.ids()[i] != instances[i].id) {
            throw IndexMismatch("index entry " + std::to_string(i) + " is '" + index.ids()[i] +
                                "', instance list has '" + instances[i].id + "'");
        }
    }

    const std::size_t n = detections.size();
    const std::size_t workers = std::clamp<std::size_t>(options.threads, 1, std::max<std::size_t>(1, n));
    std::vector<ChunkResult> chunks(workers);
    if (workers == 1) {
        chunks[0] = assign_range(detections, 0, n, instances, index);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t begin = n * w / workers;
            const std::size_t end = n * (w + 1) / workers;
            pool.emplace_back([&, w, begin, end] {
                chunks[w] = assign_range(detections, begin, end, instances, index);
            });
        }
        for (std::thread& t : pool) t.join();
    }

    AssignmentTable table;
    table.per_instance.resize(instances.size());
    for (std::size_t i = 0; i < instances.size(); ++i) table.per_instance[i].id = instances[i].id;
    // Chunks cover ascending detection ranges, so concatenation keeps input order.
    for (const ChunkResult& c : chunks) {
        for (const Hit& h : c.hits) {
            InstanceHits& slot = table.per_instance[h.instance];
            ++slot.count;
            slot.detection_ids.push_back(detections[h.detection].id);
        }
        for (std::size_t d : c.unassigned) table.unassigned.push_back(detections[d].id);
    }
    return table;
}

}  // namespace banff
