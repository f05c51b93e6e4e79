#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "geofence/geo_types.hpp"

namespace geofence {

/// Static R-tree packed with Sort-Tile-Recursive bulk loading.
/// Rebuilt wholesale on change; queries are read-only and thread-safe.
template <typename Value, std::size_t MaxEntries = 16>
class StaticRTree {
  static_assert(MaxEntries >= 2);

 public:
  struct Entry {
    BBox box;
    Value value;
  };

  StaticRTree() = default;

  explicit StaticRTree(std::vector<Entry> entries) { build(std::move(entries)); }

  void build(std::vector<Entry> entries) {
    entries_ = std::move(entries);
    nodes_.clear();
    root_ = kNone;
    if (entries_.empty()) return;

    std::vector<std::size_t> order(entries_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::vector<Node> level = pack(order, [this](std::size_t i) { return entries_[i].box; }, true);

    while (level.size() > 1) {
      const std::size_t base = nodes_.size();
      nodes_.insert(nodes_.end(), level.begin(), level.end());
      std::vector<std::size_t> ids(level.size());
      for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = base + i;
      level = pack(ids, [this](std::size_t i) { return nodes_[i].box; }, false);
    }
    nodes_.push_back(level.front());
    root_ = nodes_.size() - 1;
  }

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  std::size_t node_count() const noexcept { return nodes_.size(); }

  /// Calls fn(value, box) for every entry whose box intersects `query`.
  template <typename Fn>
  void query(const BBox& query, Fn&& fn) const {
    if (root_ == kNone || query.empty()) return;
    std::vector<std::size_t> stack{root_};
    while (!stack.empty()) {
      const Node& node = nodes_[stack.back()];
      stack.pop_back();
      if (!node.box.intersects(query)) continue;
      for (std::size_t k = 0; k < node.count; ++k) {
        const std::size_t child = node.children[k];
        if (node.leaf) {
          const Entry& e = entries_[child];
          if (e.box.intersects(query)) fn(e.value, e.box);
        } else {
          stack.push_back(child);
        }
      }
    }
  }

  std::vector<Value> query(const BBox& q) const {
    std::vector<Value> out;
    query(q, [&out](const Value& v, const BBox&) { out.push_back(v); });
    return out;
  }

  /// Every stored value, in insertion order.
  std::vector<Value> values() const {
    std::vector<Value> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.value);
    return out;
  }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  struct Node {
    BBox box;
    bool leaf = true;
    std::size_t count = 0;
    std::size_t children[MaxEntries]{};
  };

  template <typename BoxOf>
  static std::vector<Node> pack(std::vector<std::size_t> ids, BoxOf box_of, bool leaf) {
    const std::size_t n = ids.size();
    const std::size_t pages = (n + MaxEntries - 1) / MaxEntries;
    const auto slices = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(pages))));
    const std::size_t per_slice = slices * MaxEntries;

    std::sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) {
      return box_of(a).center_lon() < box_of(b).center_lon();
    });
    std::vector<Node> out;
    out.reserve(pages);
    for (std::size_t s = 0; s < n; s += per_slice) {
      const auto first = ids.begin() + static_cast<std::ptrdiff_t>(s);
      const auto last = ids.begin() + static_cast<std::ptrdiff_t>(std::min(n, s + per_slice));
      std::sort(first, last, [&](std::size_t a, std::size_t b) {
        return box_of(a).center_lat() < box_of(b).center_lat();
      });
      for (auto it = first; it < last;) {
        Node node;
        node.leaf = leaf;
        for (; it < last && node.count < MaxEntries; ++it) {
          node.children[node.count++] = *it;
          node.box.expand(box_of(*it));
        }
        out.push_back(node);
      }
    }
    return out;
  }

  std::vector<Entry> entries_;
  std::vector<Node> nodes_;
  std::size_t root_ = kNone;
};

}  // namespace geofence
