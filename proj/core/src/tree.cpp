#include "treeshift/tree.hpp"

#include <algorithm>
#include <stdexcept>

namespace treeshift {

void TreeModel::require_vertex(const VertexAddr& u) const {
  if (!contains(u)) throw std::invalid_argument("TreeModel: no such vertex '" + u.str() + "'");
}

VertexAddr TreeModel::child(const VertexAddr& u, std::int64_t j) const {
  require_vertex(u);
  if (j < 1) throw std::invalid_argument("TreeModel: child index must be >= 1");
  ChildCount n = child_count(u);
  if (n && j > *n)
    throw std::invalid_argument("TreeModel: vertex '" + u.str() + "' declares only " +
                                std::to_string(*n) + " children");
  return u.child(j);
}

std::vector<VertexAddr> TreeModel::children(const VertexAddr& u, std::int64_t count) const {
  require_vertex(u);
  if (count < 1) throw std::invalid_argument("TreeModel: child count must be >= 1");
  ChildCount n = child_count(u);
  std::int64_t take = n ? std::min(count, *n) : count;
  std::vector<VertexAddr> out;
  out.reserve(static_cast<std::size_t>(std::max<std::int64_t>(take, 0)));
  for (std::int64_t j = 1; j <= take; ++j) out.push_back(u.child(j));
  return out;
}

std::optional<VertexAddr> TreeModel::parent(const VertexAddr& u) const {
  require_vertex(u);
  return u.parent();
}

VertexAddr TreeModel::ancestor(const VertexAddr& u, std::int64_t k) const {
  require_vertex(u);
  return u.ancestor(k);
}

namespace {

constexpr std::int64_t kNoCap = 0;

// Depth-first expansion of the depth-`remaining` descendants of `at` in
// lexicographic order of the relative index tuples, stopping once `out`
// holds `width` entries. `cap` bounds every coordinate (kNoCap = unbounded);
// with `need_cap_hit` a tuple is emitted only if some coordinate equals
// `cap`, which yields the shells of the graded order.
//
// `bound` is the structural bound of the tree (see graded_shell_bound):
// child subtrees at indices above max(bound, cap) are pairwise identical, so
// after the first empty one the sibling loop can stop. That keeps the walk
// finite on declared trees with dead ends.
bool expand(const TreeModel& tree, const VertexAddr& at, std::int64_t remaining,
            std::int64_t width, std::int64_t cap, bool need_cap_hit, std::int64_t bound,
            std::vector<VertexAddr>& out) {
  if (remaining == 0) {
    if (!need_cap_hit) out.push_back(at);
    return static_cast<std::int64_t>(out.size()) >= width;
  }
  ChildCount n = tree.child_count(at);
  std::int64_t last = cap != kNoCap ? cap : std::int64_t{1} << 62;
  if (n) last = std::min(last, *n);
  for (std::int64_t j = 1; j <= last; ++j) {
    bool still_need = need_cap_hit && j != cap;
    std::size_t before = out.size();
    if (expand(tree, at.child(j), remaining - 1, width, cap, still_need, bound, out)) return true;
    if (out.size() == before && j > bound && j > cap) break;
  }
  return false;
}

}  // namespace

std::vector<VertexAddr> TreeModel::generation(const VertexAddr& base, std::int64_t n,
                                              std::int64_t width) const {
  require_vertex(base);
  if (n < 0 || width < 1) throw std::invalid_argument("TreeModel: bad generation parameters");
  std::vector<VertexAddr> out;
  if (n == 0) {
    out.push_back(base);
    return out;
  }
  expand(*this, base, n, width, kNoCap, false, graded_shell_bound(), out);
  return out;
}

std::vector<VertexAddr> TreeModel::generation_graded(const VertexAddr& base, std::int64_t n,
                                                     std::int64_t width) const {
  require_vertex(base);
  if (n < 0 || width < 1) throw std::invalid_argument("TreeModel: bad generation parameters");
  std::vector<VertexAddr> out;
  if (n == 0) {
    out.push_back(base);
    return out;
  }
  std::int64_t bound = graded_shell_bound();
  for (std::int64_t g = 1; static_cast<std::int64_t>(out.size()) < width; ++g) {
    std::size_t before = out.size();
    expand(*this, base, n, width, g, /*need_cap_hit=*/true, bound, out);
    // Past the structural bound all shells look alike, so one empty shell
    // means the generation is exhausted.
    if (out.size() == before && g > bound) break;
  }
  return out;
}

std::vector<VertexAddr> TreeModel::probe_window(std::int64_t depth, std::int64_t width) const {
  if (depth < 0 || width < 1) throw std::invalid_argument("TreeModel: bad window parameters");
  VertexAddr base = is_rooted() ? VertexAddr::root() : VertexAddr::rootless(depth);
  std::vector<VertexAddr> out;
  for (std::int64_t d = 0; d <= depth; ++d) {
    auto slice = generation_graded(base, d, width);
    out.insert(out.end(), slice.begin(), slice.end());
  }
  return out;
}

VertexAddr TreeModel::base_vertex() const {
  return is_rooted() ? VertexAddr::root() : VertexAddr::rootless(0);
}

UserTree::UserTree(std::map<VertexAddr, ChildCount> degrees, ChildCount default_degree)
    : degrees_(std::move(degrees)), default_degree_(default_degree) {
  if (!degrees_.count(VertexAddr::root()))
    throw std::invalid_argument("UserTree: root must be declared");
  bound_ = default_degree_.value_or(0);
  for (const auto& [addr, degree] : degrees_) {
    if (addr.in_rootless_tree()) throw std::invalid_argument("UserTree: rooted addresses only");
    if (degree && *degree < 0) throw std::invalid_argument("UserTree: negative degree");
    if (degree) bound_ = std::max(bound_, *degree);
    for (std::int64_t j : addr.path()) bound_ = std::max(bound_, j);
    if (addr.is_root()) continue;
    auto p = addr.parent();
    auto it = degrees_.find(*p);
    if (it == degrees_.end())
      throw std::invalid_argument("UserTree: parent of '" + addr.str() + "' not declared");
    if (it->second && addr.index_in_parent() > *it->second)
      throw std::invalid_argument("UserTree: '" + addr.str() +
                                  "' exceeds its parent's declared degree");
  }
}

bool UserTree::contains(const VertexAddr& u) const {
  if (u.in_rootless_tree()) return false;
  if (degrees_.count(u)) return true;
  VertexAddr at = VertexAddr::root();
  for (std::int64_t j : u.path()) {
    auto it = degrees_.find(at);
    ChildCount degree = it != degrees_.end() ? it->second : default_degree_;
    if (degree && j > *degree) return false;
    at = at.child(j);
  }
  return true;
}

ChildCount UserTree::child_count(const VertexAddr& u) const {
  auto it = degrees_.find(u);
  if (it != degrees_.end()) return it->second;
  require_vertex(u);
  return default_degree_;
}

std::vector<VertexAddr> UserTree::declared_vertices() const {
  std::vector<VertexAddr> out;
  out.reserve(degrees_.size());
  for (const auto& [addr, degree] : degrees_) out.push_back(addr);
  return out;
}

}  // namespace treeshift
