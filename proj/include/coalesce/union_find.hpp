#pragma once

#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

namespace coalesce {

// Disjoint sets over 0..n-1 with path halving and union by size.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1), classes_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t v) {
    while (parent_[v] != v) {
      parent_[v] = parent_[parent_[v]];
      v = parent_[v];
    }
    return v;
  }

  // Returns true if a merge happened.
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    --classes_;
    return true;
  }

  bool same(std::size_t a, std::size_t b) { return find(a) == find(b); }

  [[nodiscard]] std::size_t size() const { return parent_.size(); }
  [[nodiscard]] std::size_t class_count() const { return classes_; }
  std::size_t class_size(std::size_t v) { return size_[find(v)]; }

  // Dense labels 0..k-1 in order of first appearance by vertex index.
  std::vector<std::size_t> labels() {
    std::vector<std::size_t> label(parent_.size());
    std::vector<std::size_t> root_label(parent_.size(), kUnset);
    std::size_t next = 0;
    for (std::size_t v = 0; v < parent_.size(); ++v) {
      const std::size_t r = find(v);
      if (root_label[r] == kUnset) root_label[r] = next++;
      label[v] = root_label[r];
    }
    return label;
  }

 private:
  static constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
  std::size_t classes_;
};

}  // namespace coalesce
