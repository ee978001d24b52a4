#pragma once

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "cat0bd/errors.hpp"
#include "cat0bd/tree_end.hpp"
#include "cat0bd/word.hpp"

namespace cat0bd {

/// Element (w, z) of G = F2 x Z.
struct GroupElement {
  Word word;
  std::int64_t z = 0;

  GroupElement() = default;
  GroupElement(Word w, std::int64_t n) : word(std::move(w)), z(n) {}

  static GroupElement identity() { return {}; }
  bool is_identity() const { return word.empty() && z == 0; }

  /// Word-metric length with generators {a, b, z}.
  std::int64_t length() const { return static_cast<std::int64_t>(word.size()) + std::llabs(z); }

  /// "word:z", identity is ":0".
  std::string to_string() const { return word.str() + ":" + std::to_string(z); }

  static GroupElement parse(std::string_view text) {
    auto colon = text.find(':');
    if (colon == std::string_view::npos)
      throw std::invalid_argument("group element must look like 'word:z': '" + std::string(text) + "'");
    std::int64_t z = 0;
    try {
      std::size_t pos = 0;
      std::string tail(text.substr(colon + 1));
      z = std::stoll(tail, &pos);
      if (pos != tail.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw std::invalid_argument("bad z component in '" + std::string(text) + "'");
    }
    return {Word(text.substr(0, colon)), z};
  }

  friend bool operator==(const GroupElement&, const GroupElement&) = default;
  /// Canonical order: by serialization.
  friend bool operator<(const GroupElement& x, const GroupElement& y) {
    return x.to_string() < y.to_string();
  }
};

inline GroupElement multiply(const GroupElement& g, const GroupElement& h) {
  return {g.word * h.word, g.z + h.z};
}

inline GroupElement operator*(const GroupElement& g, const GroupElement& h) { return multiply(g, h); }

inline GroupElement inverse(const GroupElement& g) { return {g.word.inverse(), -g.z}; }

/// g^n by repeated squaring; negative n inverts first.
inline GroupElement power(const GroupElement& g, std::int64_t n) {
  GroupElement base = n < 0 ? inverse(g) : g;
  std::uint64_t e = n < 0 ? static_cast<std::uint64_t>(-(n + 1)) + 1 : static_cast<std::uint64_t>(n);
  GroupElement r;
  while (e) {
    if (e & 1) r = r * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return r;
}

/// Number of reduced words of length exactly k.
inline std::int64_t sphere_size_free(std::int64_t k) {
  if (k == 0) return 1;
  std::int64_t s = 4;
  for (std::int64_t i = 1; i < k; ++i) s *= 3;
  return s;
}

/// Closed-form |ball(L)| in G: sum over |w| = k of the 2(L-k)+1 admissible z.
inline std::int64_t ball_size(std::int64_t L) {
  std::int64_t total = 0;
  for (std::int64_t k = 0; k <= L; ++k) total += sphere_size_free(k) * (2 * (L - k) + 1);
  return total;
}

/// Visits every reduced word of length <= max_len in depth-first order.
/// The word passed to the visitor is a scratch buffer.
inline void for_each_word(std::size_t max_len, const std::function<void(const Word&)>& visit) {
  Word w;
  std::function<void()> rec = [&] {
    visit(w);
    if (w.size() == max_len) return;
    for (Letter l : kLetters) {
      if (!w.empty() && w.back() == inverse(l)) continue;
      w.push(l);
      rec();
      w.pop();
    }
  };
  rec();
}

/// Streams ball(L) = {(w, n) : |w| + |n| <= L} without materializing it.
inline void for_each_in_ball(std::int64_t L, const std::function<void(const GroupElement&)>& visit) {
  if (L < 0) return;
  GroupElement g;
  for_each_word(static_cast<std::size_t>(L), [&](const Word& w) {
    std::int64_t slack = L - static_cast<std::int64_t>(w.size());
    g.word = w;
    for (std::int64_t n = -slack; n <= slack; ++n) {
      g.z = n;
      visit(g);
    }
  });
}

/// All of ball(L), ordered by (length, serialization).
inline std::vector<GroupElement> ball(std::int64_t L) {
  if (L < 0) throw std::invalid_argument("ball radius must be nonnegative");
  std::vector<GroupElement> out;
  out.reserve(static_cast<std::size_t>(ball_size(L)));
  for_each_in_ball(L, [&](const GroupElement& g) { out.push_back(g); });
  std::sort(out.begin(), out.end(), [](const GroupElement& x, const GroupElement& y) {
    if (x.length() != y.length()) return x.length() < y.length();
    return x < y;
  });
  return out;
}

/// The end w^inf: limit in the tree boundary of the vertices w^n.
inline TreeEnd power_end(const Word& w) {
  auto [u, core] = cyclic_reduce(w);
  if (core.empty()) throw EmptyPeriod("power_end: trivial word has no end");
  return TreeEnd(u, core);
}

}  // namespace cat0bd
