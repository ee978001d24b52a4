#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "cat0bd/errors.hpp"
#include "cat0bd/word.hpp"

namespace cat0bd {

/// Point of the boundary of the Cayley tree: the infinite reduced word
/// prefix * period * period * ...
///
/// Always canonical after construction: the period is cyclically reduced and
/// primitive, the junction prefix|period does not cancel, and the prefix is as
/// short as possible. Two ends are equal iff their canonical data match.
class TreeEnd {
 public:
  TreeEnd(Word prefix, Word period) : prefix_(std::move(prefix)), period_(std::move(period)) {
    canonicalize();
  }

  /// The end period^inf.
  explicit TreeEnd(Word period) : TreeEnd(Word(), std::move(period)) {}

  const Word& prefix() const { return prefix_; }
  const Word& period() const { return period_; }

  Letter letter_at(std::size_t i) const {
    if (i < prefix_.size()) return prefix_[i];
    return period_[(i - prefix_.size()) % period_.size()];
  }

  /// First n letters of the infinite word.
  Word expand(std::size_t n) const {
    std::string s;
    s.reserve(n);
    for (std::size_t i = 0; i < n; ++i) s.push_back(to_char(letter_at(i)));
    Word w(s);
    return w;
  }

  /// g * end, cancelling g's tail against the start of the end.
  TreeEnd left_multiply(const Word& g) const {
    std::size_t reps = g.size() / period_.size() + 2;
    Word body = prefix_;
    for (std::size_t r = 0; r < reps; ++r) body = body * period_;
    return TreeEnd(g * body, period_);
  }

  /// "prefix(period)^inf"
  std::string to_string() const { return prefix_.str() + "(" + period_.str() + ")^inf"; }

  /// Accepts "prefix(period)^inf" and the shorthand "period^inf".
  static TreeEnd parse(std::string_view text) {
    auto inf = text.rfind("^inf");
    if (inf == std::string_view::npos || inf + 4 != text.size())
      throw std::invalid_argument("tree end must end with ^inf: '" + std::string(text) + "'");
    auto body = text.substr(0, inf);
    if (!body.empty() && body.back() == ')') {
      auto open = body.rfind('(');
      if (open == std::string_view::npos)
        throw std::invalid_argument("unbalanced tree end: '" + std::string(text) + "'");
      return TreeEnd(Word(body.substr(0, open)), Word(body.substr(open + 1, body.size() - open - 2)));
    }
    return TreeEnd(Word(body));
  }

  friend bool operator==(const TreeEnd&, const TreeEnd&) = default;
  friend auto operator<=>(const TreeEnd& x, const TreeEnd& y) {
    if (auto c = x.prefix_ <=> y.prefix_; c != 0) return c;
    return x.period_ <=> y.period_;
  }

 private:
  void canonicalize() {
    if (period_.empty()) throw EmptyPeriod("tree end needs a nontrivial period");
    // period = u c u^-1 gives the same end as prefix*u followed by c^inf.
    auto [u, core] = cyclic_reduce(period_);
    prefix_ = prefix_ * u;
    period_ = std::move(core);
    while (!prefix_.empty() && prefix_.back() == inverse(period_.front())) {
      prefix_.pop();
      period_ = rotate_left(period_);
    }
    period_ = primitive_root(period_);
    while (!prefix_.empty() && prefix_.back() == period_.back()) {
      prefix_.pop();
      period_ = rotate_right(period_);
    }
  }

  Word prefix_;
  Word period_;
};

/// Length of the longest common initial segment; nullopt when the ends are
/// equal (the common segment is infinite).
inline std::optional<std::size_t> common_prefix_length(const TreeEnd& x, const TreeEnd& y) {
  if (x == y) return std::nullopt;
  // Two distinct eventually periodic words differ within this many letters.
  std::size_t bound = std::max(x.prefix().size(), y.prefix().size()) + x.period().size() +
                      y.period().size() + 1;
  for (std::size_t i = 0; i < bound; ++i)
    if (x.letter_at(i) != y.letter_at(i)) return i;
  return bound;
}

}  // namespace cat0bd
