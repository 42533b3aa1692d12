#pragma once

// Symmetric relations on the positive integers, kept as closed predicate
// expressions. Only explicit edge sets are materialized.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "coalesce/error.hpp"

namespace coalesce {

struct Edge {
  std::size_t i;
  std::size_t j;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

class Relation {
 public:
  struct Maximal {};
  struct Empty {};
  // Both endpoints in class B_l = {l, m+l, 2m+l, ...}, 1 <= l <= m.
  struct IntraClass {
    std::size_t m;
    std::size_t l;
  };
  // (i - j) mod m != 0.
  struct InterClass {
    std::size_t m;
  };
  // R^{[m up]}: contains(i,j) iff base contains (i+m, j+m).
  struct Shifted {
    std::shared_ptr<const Relation> base;
    std::size_t m;
  };
  // R^{[down m up]} = R restricted to pairs with min <= m < max.
  struct UpDown {
    std::shared_ptr<const Relation> base;
    std::size_t m;
  };
  struct Union {
    std::shared_ptr<const Relation> a;
    std::shared_ptr<const Relation> b;
  };
  // Sorted, deduplicated, i < j.
  struct ExplicitEdgeSet {
    std::vector<Edge> edges;
  };

  using Kind = std::variant<Maximal, Empty, IntraClass, InterClass, Shifted, UpDown, Union, ExplicitEdgeSet>;

  static Relation maximal() { return Relation(Maximal{}); }
  static Relation empty() { return Relation(Empty{}); }
  static Relation intra_class(std::size_t m, std::size_t l) {
    if (m == 0 || l == 0 || l > m) throw UsageError("intra: need 1 <= l <= m");
    return Relation(IntraClass{m, l});
  }
  static Relation inter_class(std::size_t m) {
    if (m == 0) throw UsageError("inter: need m >= 1");
    return Relation(InterClass{m});
  }
  static Relation shifted(Relation base, std::size_t m) {
    return Relation(Shifted{std::make_shared<const Relation>(std::move(base)), m});
  }
  static Relation up_down(Relation base, std::size_t m) {
    return Relation(UpDown{std::make_shared<const Relation>(std::move(base)), m});
  }
  static Relation union_of(Relation a, Relation b) {
    return Relation(Union{std::make_shared<const Relation>(std::move(a)), std::make_shared<const Relation>(std::move(b))});
  }
  static Relation explicit_edges(std::vector<Edge> edges) {
    for (auto& e : edges) {
      if (e.i == 0 || e.j == 0) throw UsageError("edges: vertices are positive integers");
      if (e.i == e.j) throw UsageError("edges: loops are not allowed");
      if (e.i > e.j) std::swap(e.i, e.j);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return Relation(ExplicitEdgeSet{std::move(edges)});
  }

  [[nodiscard]] const Kind& kind() const { return kind_; }

  [[nodiscard]] bool contains(std::size_t i, std::size_t j) const {
    if (i == j || i == 0 || j == 0) return false;
    return std::visit([&](const auto& k) { return contains_impl(k, i, j); }, kind_);
  }

  // Calls f(i, j) for every related pair i < j <= n in lexicographic order.
  template <typename F>
  void for_each_edge(std::size_t n, F&& f) const {
    if (const auto* intra = std::get_if<IntraClass>(&kind_)) {
      for (std::size_t i = intra->l; i <= n; i += intra->m)
        for (std::size_t j = i + intra->m; j <= n; j += intra->m) f(i, j);
      return;
    }
    if (std::holds_alternative<Empty>(kind_)) return;
    if (const auto* ud = std::get_if<UpDown>(&kind_)) {
      for (std::size_t i = 1; i <= std::min(ud->m, n); ++i)
        for (std::size_t j = ud->m + 1; j <= n; ++j)
          if (ud->base->contains(i, j)) f(i, j);
      return;
    }
    if (const auto* ex = std::get_if<ExplicitEdgeSet>(&kind_)) {
      for (const auto& e : ex->edges)
        if (e.j <= n) f(e.i, e.j);
      return;
    }
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t j = i + 1; j <= n; ++j)
        if (contains(i, j)) f(i, j);
  }

  [[nodiscard]] std::vector<Edge> enumerate_within(std::size_t n) const {
    std::vector<Edge> out;
    for_each_edge(n, [&](std::size_t i, std::size_t j) { out.push_back({i, j}); });
    return out;
  }

  [[nodiscard]] std::string to_string() const;

 private:
  explicit Relation(Kind kind) : kind_(std::move(kind)) {}

  static bool contains_impl(const Maximal&, std::size_t, std::size_t) { return true; }
  static bool contains_impl(const Empty&, std::size_t, std::size_t) { return false; }
  static bool contains_impl(const IntraClass& r, std::size_t i, std::size_t j) {
    const std::size_t cls = r.l % r.m;
    return i % r.m == cls && j % r.m == cls;
  }
  static bool contains_impl(const InterClass& r, std::size_t i, std::size_t j) { return i % r.m != j % r.m; }
  static bool contains_impl(const Shifted& r, std::size_t i, std::size_t j) {
    return r.base->contains(i + r.m, j + r.m);
  }
  static bool contains_impl(const UpDown& r, std::size_t i, std::size_t j) {
    const auto [lo, hi] = std::minmax(i, j);
    return lo <= r.m && r.m < hi && r.base->contains(i, j);
  }
  static bool contains_impl(const Union& r, std::size_t i, std::size_t j) {
    return r.a->contains(i, j) || r.b->contains(i, j);
  }
  static bool contains_impl(const ExplicitEdgeSet& r, std::size_t i, std::size_t j) {
    const Edge e{std::min(i, j), std::max(i, j)};
    return std::binary_search(r.edges.begin(), r.edges.end(), e);
  }

  Kind kind_;
};

inline bool contains(const Relation& r, std::size_t i, std::size_t j) { return r.contains(i, j); }

// R~^m = R union (R*)^{[down m up]}: R plus every pair straddling m.
inline Relation glued(const Relation& r, std::size_t m) {
  return Relation::union_of(r, Relation::up_down(Relation::maximal(), m));
}

inline std::string Relation::to_string() const {
  struct Printer {
    std::string operator()(const Maximal&) const { return "maximal"; }
    std::string operator()(const Empty&) const { return "empty"; }
    std::string operator()(const IntraClass& r) const {
      return "intra:" + std::to_string(r.m) + "," + std::to_string(r.l);
    }
    std::string operator()(const InterClass& r) const { return "inter:" + std::to_string(r.m); }
    std::string operator()(const Shifted& r) const {
      return "shift:" + std::to_string(r.m) + "(" + r.base->to_string() + ")";
    }
    std::string operator()(const UpDown& r) const {
      return "updown:" + std::to_string(r.m) + "(" + r.base->to_string() + ")";
    }
    std::string operator()(const Union& r) const {
      return "union(" + r.a->to_string() + "," + r.b->to_string() + ")";
    }
    std::string operator()(const ExplicitEdgeSet& r) const {
      std::string s = "edges(";
      for (std::size_t k = 0; k < r.edges.size(); ++k) {
        if (k) s += ",";
        s += std::to_string(r.edges[k].i) + "-" + std::to_string(r.edges[k].j);
      }
      return s + ")";
    }
  };
  return std::visit(Printer{}, kind_);
}

namespace detail {

class RelationParser {
 public:
  explicit RelationParser(std::string_view text) : text_(text) {}

  Relation parse() {
    Relation r = parse_relation();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing characters");
    return r;
  }

 private:
  Relation parse_relation() {
    skip_ws();
    if (accept("maximal")) return Relation::maximal();
    if (accept("empty")) return Relation::empty();
    if (accept("intra:")) {
      const auto m = parse_int();
      expect(',');
      const auto l = parse_int();
      return Relation::intra_class(m, l);
    }
    if (accept("inter:")) return Relation::inter_class(parse_int());
    if (accept("shift:")) {
      const auto m = parse_int();
      expect('(');
      Relation base = parse_relation();
      expect(')');
      return Relation::shifted(std::move(base), m);
    }
    if (accept("updown:")) {
      const auto m = parse_int();
      expect('(');
      Relation base = parse_relation();
      expect(')');
      return Relation::up_down(std::move(base), m);
    }
    if (accept("union(")) {
      Relation a = parse_relation();
      expect(',');
      Relation b = parse_relation();
      expect(')');
      return Relation::union_of(std::move(a), std::move(b));
    }
    if (accept("edges(")) {
      std::vector<Edge> edges;
      skip_ws();
      if (!accept(")")) {
        do {
          const auto i = parse_int();
          expect('-');
          const auto j = parse_int();
          edges.push_back({i, j});
        } while (accept(","));
        expect(')');
      }
      return Relation::explicit_edges(std::move(edges));
    }
    fail("unknown relation");
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool accept(std::string_view token) {
    skip_ws();
    if (text_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(std::string_view(&c, 1))) fail(std::string("expected '") + c + "'");
  }
  std::size_t parse_int() {
    skip_ws();
    const std::size_t start = pos_;
    std::size_t value = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      value = value * 10 + static_cast<std::size_t>(text_[pos_] - '0');
      ++pos_;
    }
    if (pos_ == start) fail("expected integer");
    return value;
  }
  [[noreturn]] void fail(const std::string& why) const {
    throw UsageError("relation '" + std::string(text_) + "': " + why + " at offset " + std::to_string(pos_));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

// Spellings: maximal, empty, intra:m,l, inter:m, shift:m(<r>), updown:m(<r>),
// union(<a>,<b>), edges(i-j,...).
inline Relation parse_relation(std::string_view text) { return detail::RelationParser(text).parse(); }

}  // namespace coalesce
