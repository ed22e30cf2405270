#pragma once

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "cfseries/errors.hpp"

namespace cfs {

// Alphabet X = {x_0, x_1, ..., x_m}. Letter x_0 is the drift letter paired
// with the constant input u_0 = 1; letters x_1..x_m index the stored input
// channels.
struct Alphabet {
  int m = 0;

  int num_letters() const { return m + 1; }

  friend bool operator==(const Alphabet&, const Alphabet&) = default;
};

// A word over some alphabet, stored as letter indices. The empty word has
// length zero.
struct Word {
  std::vector<int> letters;

  Word() = default;
  explicit Word(std::vector<int> l) : letters(std::move(l)) {}

  static Word empty() { return Word{}; }

  // Power of a single letter, x_i^k.
  static Word power(int letter, int k) {
    return Word(std::vector<int>(static_cast<std::size_t>(k), letter));
  }

  int length() const { return static_cast<int>(letters.size()); }
  bool is_empty() const { return letters.empty(); }

  int front() const { return letters.front(); }

  // Word with the first letter removed.
  Word tail() const {
    return Word(std::vector<int>(letters.begin() + 1, letters.end()));
  }

  Word prepend(int letter) const {
    Word w;
    w.letters.reserve(letters.size() + 1);
    w.letters.push_back(letter);
    w.letters.insert(w.letters.end(), letters.begin(), letters.end());
    return w;
  }

  Word append(int letter) const {
    Word w(letters);
    w.letters.push_back(letter);
    return w;
  }

  friend bool operator==(const Word&, const Word&) = default;
};

// Canonical total order: length-lexicographic. All enumeration and
// serialization in the library uses this order.
struct LengthLexLess {
  bool operator()(const Word& a, const Word& b) const {
    if (a.letters.size() != b.letters.size())
      return a.letters.size() < b.letters.size();
    return a.letters < b.letters;
  }
};

// "x0 x1 x1" for words, "e" for the empty word.
inline std::string render_word(const Word& w) {
  if (w.is_empty()) return "e";
  std::ostringstream os;
  for (std::size_t i = 0; i < w.letters.size(); ++i) {
    if (i) os << ' ';
    os << 'x' << w.letters[i];
  }
  return os.str();
}

inline Word parse_word(const std::string& text) {
  Word w;
  bool saw_empty = false;
  std::istringstream is(text);
  std::string tok;
  while (is >> tok) {
    if (tok == "e") {
      if (saw_empty || !w.is_empty())
        throw FormatError("'e' may only appear alone: " + text);
      saw_empty = true;
      continue;
    }
    if (saw_empty)
      throw FormatError("'e' may only appear alone: " + text);
    if (tok.size() < 2 || tok[0] != 'x')
      throw FormatError("bad letter '" + tok + "' in word '" + text + "'");
    try {
      std::size_t pos = 0;
      int idx = std::stoi(tok.substr(1), &pos);
      if (pos != tok.size() - 1 || idx < 0)
        throw FormatError("bad letter '" + tok + "'");
      w.letters.push_back(idx);
    } catch (const std::logic_error&) {
      throw FormatError("bad letter '" + tok + "' in word '" + text + "'");
    }
  }
  return w;
}

inline constexpr std::uint64_t kDefaultWordCap = 10'000'000;

// (m+1)^k with overflow saturation.
inline std::uint64_t count_words(const Alphabet& alphabet, int k) {
  std::uint64_t n = 1;
  const std::uint64_t base = static_cast<std::uint64_t>(alphabet.num_letters());
  for (int i = 0; i < k; ++i) {
    if (n > UINT64_MAX / base) return UINT64_MAX;
    n *= base;
  }
  return n;
}

// All words of length k in canonical order.
inline std::vector<Word> enumerate_words(const Alphabet& alphabet, int k,
                                         std::uint64_t cap = kDefaultWordCap) {
  const std::uint64_t total = count_words(alphabet, k);
  if (total > cap)
    throw ResourceCapError("word enumeration would produce " +
                           std::to_string(total) + " words (cap " +
                           std::to_string(cap) + ")");
  std::vector<Word> out;
  out.reserve(static_cast<std::size_t>(total));
  Word current(std::vector<int>(static_cast<std::size_t>(k), 0));
  out.push_back(current);
  // Odometer increment in base m+1.
  for (std::uint64_t i = 1; i < total; ++i) {
    int pos = k - 1;
    while (pos >= 0 && current.letters[pos] == alphabet.m) {
      current.letters[pos] = 0;
      --pos;
    }
    ++current.letters[pos];
    out.push_back(current);
  }
  return out;
}

// X^{<=J} in canonical order.
inline std::vector<Word> enumerate_words_up_to(
    const Alphabet& alphabet, int max_length,
    std::uint64_t cap = kDefaultWordCap) {
  std::uint64_t total = 0;
  for (int k = 0; k <= max_length; ++k) {
    std::uint64_t c = count_words(alphabet, k);
    total = (total > UINT64_MAX - c) ? UINT64_MAX : total + c;
  }
  if (total > cap)
    throw ResourceCapError("word enumeration would produce " +
                           std::to_string(total) + " words (cap " +
                           std::to_string(cap) + ")");
  std::vector<Word> out;
  out.reserve(static_cast<std::size_t>(total));
  for (int k = 0; k <= max_length; ++k) {
    auto level = enumerate_words(alphabet, k, cap);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

}  // namespace cfs
