#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <vector>

namespace rdsse {

/// In-order index of a node inside the virtual perfect tree of the current
/// capacity. Leaves are even, internal nodes odd. Labels never change when
/// the tree grows to the right.
struct NodeLabel {
    std::uint64_t value = 0;

    friend auto operator<=>(const NodeLabel&, const NodeLabel&) = default;
};

struct NodeSpan {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;
    unsigned height = 0;

    friend bool operator==(const NodeSpan&, const NodeSpan&) = default;
};

/// Number of values in use (m) and the perfect-tree capacity C = 2^ceil(log2 m).
class TreeGeometry {
public:
    TreeGeometry() = default;
    explicit TreeGeometry(std::uint64_t m);

    std::uint64_t m() const { return m_; }
    std::uint64_t capacity() const { return capacity_; }
    bool empty() const { return m_ == 0; }
    NodeLabel root() const;

    /// Nodes of the virtual tree whose span intersects [0, m-1].
    std::uint64_t real_node_count() const;
    bool is_real(NodeLabel n) const;

    friend bool operator==(const TreeGeometry&, const TreeGeometry&) = default;

private:
    std::uint64_t m_ = 0;
    std::uint64_t capacity_ = 0;
};

struct Doubling {
    NodeLabel old_root;
    NodeLabel new_root;

    friend bool operator==(const Doubling&, const Doubling&) = default;
};

struct GrowthPlan {
    TreeGeometry geometry;          // geometry after the append
    std::vector<Doubling> doublings;
};

NodeLabel leaf_label(std::uint64_t v);

/// Leaf interval and height of `n` in a tree of capacity `capacity`.
/// Throws kOutOfRange when the label does not exist at that capacity.
NodeSpan node_span(NodeLabel n, std::uint64_t capacity);

NodeLabel parent_label(NodeLabel n);

/// Leaf-to-root labels; log2(capacity) + 1 entries.
std::vector<NodeLabel> path_to_root(std::uint64_t v, std::uint64_t capacity);

/// Unique minimal set of nodes whose spans partition [a, b], left to right.
/// Requires 0 <= a <= b <= m-1.
std::vector<NodeLabel> minimal_cover(std::uint64_t a, std::uint64_t b, const TreeGeometry& geo);

/// Appends value v (= m) to the domain.
GrowthPlan grow(const TreeGeometry& geo, std::uint64_t v);

}  // namespace rdsse

template <>
struct std::hash<rdsse::NodeLabel> {
    std::size_t operator()(const rdsse::NodeLabel& n) const noexcept {
        return std::hash<std::uint64_t>{}(n.value);
    }
};
