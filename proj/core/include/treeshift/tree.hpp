#pragma once

// Directed-tree models over canonical addresses.
//
// The two canonical trees (rooted / rootless, every vertex with countably
// many children) drive the constructions; UserTree supports explicitly
// declared trees with finite or infinite per-vertex child counts, which is
// what the finite-degree diagnostics operate on.
//
// Navigation is a pure function of the address, so models are immutable and
// freely shareable across threads.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "treeshift/address.hpp"

namespace treeshift {

// Child cardinality: nullopt means countably infinite (aleph_0).
using ChildCount = std::optional<std::int64_t>;

class TreeModel {
 public:
  virtual ~TreeModel() = default;

  virtual bool is_rooted() const = 0;
  virtual bool contains(const VertexAddr& u) const = 0;
  virtual ChildCount child_count(const VertexAddr& u) const = 0;

  VertexAddr child(const VertexAddr& u, std::int64_t j) const;
  // First min(count, declared degree) children, in index order.
  std::vector<VertexAddr> children(const VertexAddr& u, std::int64_t count) const;
  std::optional<VertexAddr> parent(const VertexAddr& u) const;
  VertexAddr ancestor(const VertexAddr& u, std::int64_t k) const;

  // First `width` members of Chi^n(base) in lexicographic order of the
  // relative index tuples. With infinite branching only the last coordinate
  // varies inside any finite slice.
  std::vector<VertexAddr> generation(const VertexAddr& base, std::int64_t n,
                                     std::int64_t width) const;
  // First `width` members under the graded order (max coordinate, then
  // lexicographic). Unlike plain lex this order eventually reaches every
  // member of Chi^n(base), so it is what probe windows are built from.
  std::vector<VertexAddr> generation_graded(const VertexAddr& base, std::int64_t n,
                                            std::int64_t width) const;

  // Probe window: graded slices of width `width` for every relative depth
  // 0..depth. Rooted and user trees expand from the root; the rootless tree
  // expands from the spine vertex u_{depth+1}, so the window covers the spine
  // segment u_1..u_{depth+1} and the branches hanging off it.
  std::vector<VertexAddr> probe_window(std::int64_t depth, std::int64_t width) const;

  VertexAddr base_vertex() const;  // root, or the spine vertex u_1 for rootless

 protected:
  void require_vertex(const VertexAddr& u) const;

  // Child subtrees at indices above this bound are structurally identical
  // (no declared vertex or finite degree distinguishes them), which is what
  // lets the enumerators cut off sibling scans on trees with dead ends.
  // Zero for the canonical trees.
  virtual std::int64_t graded_shell_bound() const { return 0; }
};

// Canonical rooted tree: every vertex has children 1, 2, 3, ...
class RootedInfiniteTree final : public TreeModel {
 public:
  bool is_rooted() const override { return true; }
  bool contains(const VertexAddr& u) const override { return !u.in_rootless_tree(); }
  ChildCount child_count(const VertexAddr&) const override { return std::nullopt; }
};

// Canonical rootless tree with the distinguished spine u_1, u_2, ...
class RootlessInfiniteTree final : public TreeModel {
 public:
  bool is_rooted() const override { return false; }
  bool contains(const VertexAddr& u) const override { return u.in_rootless_tree(); }
  ChildCount child_count(const VertexAddr&) const override { return std::nullopt; }
};

// Explicitly declared rooted tree. Vertices listed in `degrees` carry their
// declared child count; vertices reachable below a declared vertex but not
// listed get `default_degree`. Used for the finite-degree converse checks.
class UserTree final : public TreeModel {
 public:
  UserTree(std::map<VertexAddr, ChildCount> degrees, ChildCount default_degree);

  bool is_rooted() const override { return true; }
  bool contains(const VertexAddr& u) const override;
  ChildCount child_count(const VertexAddr& u) const override;

  // All declared vertices in address order.
  std::vector<VertexAddr> declared_vertices() const;

 protected:
  std::int64_t graded_shell_bound() const override { return bound_; }

 private:
  std::map<VertexAddr, ChildCount> degrees_;
  ChildCount default_degree_;
  std::int64_t bound_ = 0;
};

}  // namespace treeshift
