#pragma once

// Canonical vertex addresses for the two canonical infinitely-branching
// directed trees.
//
// Rooted tree: an address is the path of child indices from the root; the
// empty path is the root itself. Rootless tree: an address is a spine offset
// k (naming the vertex u_{k+1} on the distinguished ancestor chain u_1, u_2 =
// par(u_1), ...) plus a path hanging off that spine vertex. Child index 1 of
// u_{k+1} with k >= 1 is the next spine vertex u_k, so addresses are reduced:
// a stored path never starts with index 1 while the spine offset is positive.
//
// Text form: rooted "ε" or "1.3.2"; rootless "k:ε" or "k:2.5".

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace treeshift {

class VertexAddr {
 public:
  VertexAddr() = default;  // rooted root

  static VertexAddr root() { return VertexAddr(); }
  static VertexAddr rooted(std::vector<std::int64_t> path);
  // Canonicalizes: (k, 1.s) with k >= 1 reduces to (k-1, s).
  static VertexAddr rootless(std::int64_t spine_offset, std::vector<std::int64_t> path = {});

  bool in_rootless_tree() const { return rootless_; }
  bool is_root() const { return !rootless_ && path_.empty(); }
  std::int64_t spine_offset() const { return spine_offset_; }
  const std::vector<std::int64_t>& path() const { return path_; }
  // Path length; for rooted addresses this is the distance from the root.
  std::int64_t depth() const { return static_cast<std::int64_t>(path_.size()); }

  VertexAddr child(std::int64_t j) const;            // j >= 1
  std::optional<VertexAddr> parent() const;          // nullopt only for the rooted root
  VertexAddr ancestor(std::int64_t k) const;         // par^k; throws "above root"
  // Child index this vertex has inside its parent's enumeration.
  std::int64_t index_in_parent() const;              // throws for the rooted root

  std::string str() const;
  static VertexAddr parse(std::string_view text);    // throws std::invalid_argument

  friend bool operator==(const VertexAddr&, const VertexAddr&) = default;
  friend std::strong_ordering operator<=>(const VertexAddr& a, const VertexAddr& b) {
    if (a.rootless_ != b.rootless_) return a.rootless_ <=> b.rootless_;
    if (a.spine_offset_ != b.spine_offset_) return a.spine_offset_ <=> b.spine_offset_;
    return a.path_ <=> b.path_;
  }

 private:
  bool rootless_ = false;
  std::int64_t spine_offset_ = 0;  // always 0 for rooted addresses
  std::vector<std::int64_t> path_;
};

std::ostream& operator<<(std::ostream& os, const VertexAddr& a);

}  // namespace treeshift
