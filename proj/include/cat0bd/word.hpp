#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cat0bd {

/// Generator of F2 = <a, b> or its inverse. The character value doubles as
/// the serialized form: capital letters are inverses.
enum class Letter : char { a = 'a', A = 'A', b = 'b', B = 'B' };

constexpr Letter inverse(Letter l) {
  switch (l) {
    case Letter::a: return Letter::A;
    case Letter::A: return Letter::a;
    case Letter::b: return Letter::B;
    case Letter::B: return Letter::b;
  }
  return l;
}

constexpr char to_char(Letter l) { return static_cast<char>(l); }

inline Letter letter_from_char(char c) {
  switch (c) {
    case 'a': return Letter::a;
    case 'A': return Letter::A;
    case 'b': return Letter::b;
    case 'B': return Letter::B;
    default: throw std::invalid_argument(std::string("not a letter of F2: '") + c + "'");
  }
}

constexpr std::array<Letter, 4> kLetters{Letter::a, Letter::A, Letter::b, Letter::B};

/// Freely reduced word in F2. Stored as its ASCII serialization so short
/// words stay in the small-string buffer.
class Word {
 public:
  Word() = default;

  /// Parses and freely reduces an ASCII word over {a, A, b, B}.
  explicit Word(std::string_view text) {
    for (char c : text) push(letter_from_char(c));
  }

  static Word from_letters(std::span<const Letter> letters) {
    Word w;
    for (Letter l : letters) w.push(l);
    return w;
  }

  std::size_t size() const { return s_.size(); }
  bool empty() const { return s_.empty(); }
  Letter operator[](std::size_t i) const { return static_cast<Letter>(s_[i]); }
  Letter front() const { return static_cast<Letter>(s_.front()); }
  Letter back() const { return static_cast<Letter>(s_.back()); }
  const std::string& str() const { return s_; }

  /// Appends with cancellation against the last letter.
  void push(Letter l) {
    if (!s_.empty() && static_cast<Letter>(s_.back()) == cat0bd::inverse(l)) {
      s_.pop_back();
    } else {
      s_.push_back(to_char(l));
    }
  }
  void pop() { s_.pop_back(); }

  Word prefix(std::size_t n) const {
    Word w;
    w.s_ = s_.substr(0, n);
    return w;
  }
  Word suffix_from(std::size_t n) const {
    Word w;
    w.s_ = s_.substr(std::min(n, s_.size()));
    return w;
  }

  Word inverse() const {
    Word w;
    w.s_.reserve(s_.size());
    for (auto it = s_.rbegin(); it != s_.rend(); ++it)
      w.s_.push_back(to_char(cat0bd::inverse(static_cast<Letter>(*it))));
    return w;
  }

  friend Word operator*(Word lhs, const Word& rhs) {
    for (char c : rhs.s_) lhs.push(static_cast<Letter>(c));
    return lhs;
  }

  friend bool operator==(const Word&, const Word&) = default;
  friend auto operator<=>(const Word& x, const Word& y) { return x.s_ <=> y.s_; }

  friend std::ostream& operator<<(std::ostream& os, const Word& w) { return os << w.s_; }

 private:
  std::string s_;
};

/// Free reduction of an arbitrary letter sequence.
inline Word reduce(std::span<const Letter> letters) { return Word::from_letters(letters); }

/// Length of the longest common prefix.
inline std::size_t common_prefix(const Word& x, const Word& y) {
  auto [ix, iy] = std::mismatch(x.str().begin(), x.str().end(), y.str().begin(), y.str().end());
  return static_cast<std::size_t>(ix - x.str().begin());
}

/// Decomposition w = u * c * u^-1 with c cyclically reduced and |u| minimal.
struct CyclicDecomposition {
  Word conjugator;
  Word core;
};

inline CyclicDecomposition cyclic_reduce(const Word& w) {
  std::size_t k = 0;
  const std::size_t n = w.size();
  while (2 * k + 1 < n && w[k] == inverse(w[n - 1 - k])) ++k;
  return {w.prefix(k), w.prefix(n - k).suffix_from(k)};
}

inline bool is_cyclically_reduced(const Word& w) {
  return w.size() < 2 || w.front() != inverse(w.back());
}

/// Left rotation by one letter; stays cyclically reduced if w was.
inline Word rotate_left(const Word& w) {
  if (w.size() < 2) return w;
  return Word(w.str().substr(1) + w.str().front());
}

inline Word rotate_right(const Word& w) {
  if (w.size() < 2) return w;
  return Word(std::string(1, w.str().back()) + w.str().substr(0, w.size() - 1));
}

/// Shortest r with w = r^m.
inline Word primitive_root(const Word& w) {
  const std::size_t n = w.size();
  for (std::size_t p = 1; p < n; ++p) {
    if (n % p != 0) continue;
    bool periodic = true;
    for (std::size_t i = p; i < n && periodic; ++i) periodic = w.str()[i] == w.str()[i - p];
    if (periodic) return w.prefix(p);
  }
  return w;
}

}  // namespace cat0bd
