#include "treeshift/address.hpp"

#include <charconv>
#include <ostream>
#include <stdexcept>

namespace treeshift {

namespace {

constexpr std::string_view kEpsilon = "ε";  // "ε"

void check_path(const std::vector<std::int64_t>& path) {
  for (std::int64_t j : path)
    if (j < 1) throw std::invalid_argument("VertexAddr: path entries must be >= 1");
}

std::int64_t parse_int(std::string_view s, const char* what) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw std::invalid_argument(std::string("VertexAddr: bad ") + what + " '" + std::string(s) +
                                "'");
  return v;
}

}  // namespace

VertexAddr VertexAddr::rooted(std::vector<std::int64_t> path) {
  check_path(path);
  VertexAddr a;
  a.path_ = std::move(path);
  return a;
}

VertexAddr VertexAddr::rootless(std::int64_t spine_offset, std::vector<std::int64_t> path) {
  if (spine_offset < 0) throw std::invalid_argument("VertexAddr: negative spine offset");
  check_path(path);
  VertexAddr a;
  a.rootless_ = true;
  a.spine_offset_ = spine_offset;
  a.path_ = std::move(path);
  while (a.spine_offset_ >= 1 && !a.path_.empty() && a.path_.front() == 1) {
    --a.spine_offset_;
    a.path_.erase(a.path_.begin());
  }
  return a;
}

VertexAddr VertexAddr::child(std::int64_t j) const {
  if (j < 1) throw std::invalid_argument("VertexAddr: child index must be >= 1");
  VertexAddr c = *this;
  if (rootless_ && path_.empty() && spine_offset_ >= 1 && j == 1) {
    --c.spine_offset_;  // spine descent u_{k+1} -> u_k
    return c;
  }
  c.path_.push_back(j);
  return c;
}

std::optional<VertexAddr> VertexAddr::parent() const {
  if (is_root()) return std::nullopt;
  VertexAddr p = *this;
  if (path_.empty()) {
    ++p.spine_offset_;  // rootless spine walk u_{k+1} -> u_{k+2}
    return p;
  }
  p.path_.pop_back();
  return p;
}

VertexAddr VertexAddr::ancestor(std::int64_t k) const {
  if (k < 0) throw std::invalid_argument("VertexAddr: negative ancestor count");
  VertexAddr a = *this;
  std::int64_t pops = std::min<std::int64_t>(k, a.depth());
  a.path_.resize(a.path_.size() - static_cast<std::size_t>(pops));
  std::int64_t rest = k - pops;
  if (rest > 0) {
    if (!rootless_) throw std::domain_error("VertexAddr: ancestor above root");
    a.spine_offset_ += rest;
  }
  return a;
}

std::int64_t VertexAddr::index_in_parent() const {
  if (is_root()) throw std::domain_error("VertexAddr: root has no parent");
  if (!path_.empty()) return path_.back();
  return 1;  // canonical spine vertex: child 1 of the next spine vertex
}

std::string VertexAddr::str() const {
  std::string out;
  if (rootless_) {
    out += std::to_string(spine_offset_);
    out += ':';
  }
  if (path_.empty()) {
    out += kEpsilon;
    return out;
  }
  for (std::size_t i = 0; i < path_.size(); ++i) {
    if (i) out += '.';
    out += std::to_string(path_[i]);
  }
  return out;
}

VertexAddr VertexAddr::parse(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("VertexAddr: empty address");
  bool rootless = false;
  std::int64_t spine = 0;
  auto colon = text.find(':');
  if (colon != std::string_view::npos) {
    rootless = true;
    spine = parse_int(text.substr(0, colon), "spine offset");
    if (spine < 0) throw std::invalid_argument("VertexAddr: negative spine offset");
    text.remove_prefix(colon + 1);
  }
  std::vector<std::int64_t> path;
  if (text != kEpsilon) {
    if (text.empty()) throw std::invalid_argument("VertexAddr: empty path");
    std::size_t pos = 0;
    while (pos <= text.size()) {
      auto dot = text.find('.', pos);
      auto end = dot == std::string_view::npos ? text.size() : dot;
      std::int64_t j = parse_int(text.substr(pos, end - pos), "path entry");
      if (j < 1) throw std::invalid_argument("VertexAddr: path entries must be >= 1");
      path.push_back(j);
      if (dot == std::string_view::npos) break;
      pos = dot + 1;
    }
  }
  return rootless ? VertexAddr::rootless(spine, std::move(path))
                  : VertexAddr::rooted(std::move(path));
}

std::ostream& operator<<(std::ostream& os, const VertexAddr& a) { return os << a.str(); }

}  // namespace treeshift
