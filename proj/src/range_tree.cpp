#include "rdsse/range_tree.hpp"

#include <bit>
#include <string>

#include "rdsse/error.hpp"

namespace rdsse {

namespace {

void check_capacity(std::uint64_t capacity) {
    if (capacity == 0 || !std::has_single_bit(capacity)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "capacity must be a power of two, got " + std::to_string(capacity));
    }
}

NodeLabel label_of(std::uint64_t lo, unsigned height) {
    return NodeLabel{2 * lo + (std::uint64_t{1} << height) - 1};
}

void cover_rec(std::uint64_t lo, unsigned height, std::uint64_t a, std::uint64_t b,
               std::vector<NodeLabel>& out) {
    std::uint64_t hi = lo + (std::uint64_t{1} << height) - 1;
    if (hi < a || lo > b) return;
    if (a <= lo && hi <= b) {
        out.push_back(label_of(lo, height));
        return;
    }
    std::uint64_t half = std::uint64_t{1} << (height - 1);
    cover_rec(lo, height - 1, a, b, out);
    cover_rec(lo + half, height - 1, a, b, out);
}

}  // namespace

TreeGeometry::TreeGeometry(std::uint64_t m)
    : m_(m), capacity_(m == 0 ? 0 : std::bit_ceil(m)) {}

NodeLabel TreeGeometry::root() const {
    if (m_ == 0) throw Error(ErrorCode::kPrecondition, "empty tree has no root");
    return NodeLabel{capacity_ - 1};
}

std::uint64_t TreeGeometry::real_node_count() const {
    std::uint64_t count = 0;
    for (std::uint64_t width = 1; width <= capacity_; width <<= 1) {
        count += (m_ + width - 1) / width;
    }
    return count;
}

bool TreeGeometry::is_real(NodeLabel n) const {
    if (m_ == 0 || n.value > 2 * capacity_ - 2) return false;
    return node_span(n, capacity_).lo < m_;
}

NodeLabel leaf_label(std::uint64_t v) { return NodeLabel{2 * v}; }

NodeSpan node_span(NodeLabel n, std::uint64_t capacity) {
    check_capacity(capacity);
    if (n.value > 2 * capacity - 2) {
        throw Error(ErrorCode::kOutOfRange,
                    "label " + std::to_string(n.value) + " outside capacity " +
                        std::to_string(capacity));
    }
    auto height = static_cast<unsigned>(std::countr_one(n.value));
    std::uint64_t lo = (n.value - ((std::uint64_t{1} << height) - 1)) / 2;
    return {lo, lo + (std::uint64_t{1} << height) - 1, height};
}

NodeLabel parent_label(NodeLabel n) {
    auto height = static_cast<unsigned>(std::countr_one(n.value));
    std::uint64_t lo = (n.value - ((std::uint64_t{1} << height) - 1)) / 2;
    std::uint64_t parent_lo = lo & ~((std::uint64_t{1} << (height + 1)) - 1);
    return label_of(parent_lo, height + 1);
}

std::vector<NodeLabel> path_to_root(std::uint64_t v, std::uint64_t capacity) {
    check_capacity(capacity);
    if (v >= capacity) {
        throw Error(ErrorCode::kOutOfRange,
                    "value " + std::to_string(v) + " outside capacity " + std::to_string(capacity));
    }
    auto levels = static_cast<unsigned>(std::countr_zero(capacity));
    std::vector<NodeLabel> path;
    path.reserve(levels + 1);
    NodeLabel n = leaf_label(v);
    path.push_back(n);
    for (unsigned i = 0; i < levels; ++i) {
        n = parent_label(n);
        path.push_back(n);
    }
    return path;
}

std::vector<NodeLabel> minimal_cover(std::uint64_t a, std::uint64_t b, const TreeGeometry& geo) {
    if (geo.empty()) throw Error(ErrorCode::kPrecondition, "cover of an empty tree");
    if (a > b) {
        throw Error(ErrorCode::kInvalidArgument,
                    "range start " + std::to_string(a) + " > end " + std::to_string(b));
    }
    if (b >= geo.m()) {
        throw Error(ErrorCode::kOutOfRange,
                    "range end " + std::to_string(b) + " beyond m-1 = " + std::to_string(geo.m() - 1));
    }
    std::vector<NodeLabel> out;
    cover_rec(0, static_cast<unsigned>(std::countr_zero(geo.capacity())), a, b, out);
    return out;
}

GrowthPlan grow(const TreeGeometry& geo, std::uint64_t v) {
    if (v != geo.m()) {
        throw Error(ErrorCode::kPrecondition,
                    "grow expects v = m = " + std::to_string(geo.m()) + ", got " + std::to_string(v));
    }
    GrowthPlan plan{TreeGeometry(geo.m() + 1), {}};
    if (!geo.empty() && geo.m() == geo.capacity()) {
        std::uint64_t c = geo.capacity();
        plan.doublings.push_back({NodeLabel{c - 1}, NodeLabel{2 * c - 1}});
    }
    return plan;
}

}  // namespace rdsse
