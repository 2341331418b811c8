#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <set>
#include <utility>
#include <vector>

#include "btit/graph.hpp"

namespace btit::search {

using graph::NodeId;

/// Open list for one search direction. Entries are ordered by key, then by
/// larger g, then by smaller id. Secondary indexes give the minimum f = g + h,
/// g and MM priority max(f, 2g) over the current entries.
class OpenQueue
{
public:
  struct Entry
  {
    double key = 0.0;
    double g = 0.0;
    double f = 0.0;
    NodeId id = graph::kNoNode;
    double pr() const noexcept { return std::max(f, 2.0 * g); }
  };

  bool empty() const noexcept { return by_key_.empty(); }
  std::size_t size() const noexcept { return by_key_.size(); }
  bool contains(NodeId id) const noexcept { return id < slot_.size() && slot_[id].id != graph::kNoNode; }

  // Inserts, or re-keys an existing entry.
  void push(const Entry& e);
  void erase(NodeId id);
  Entry top() const;
  Entry pop();
  void clear();

  double key_min() const noexcept;
  double f_min() const noexcept;
  double g_min() const noexcept;
  double pr_min() const noexcept;

  // True when a is served before b.
  static bool before(const Entry& a, const Entry& b) noexcept;

private:
  struct KeyOrder
  {
    bool operator()(const Entry& a, const Entry& b) const noexcept { return before(a, b); }
  };
  using Pair = std::pair<double, NodeId>;

  std::set<Entry, KeyOrder> by_key_;
  std::set<Pair> by_f_, by_g_, by_pr_;
  std::vector<Entry> slot_;
};

}  // namespace btit::search
