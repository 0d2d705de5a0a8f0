#pragma once

// i-Fibonacci words: f_1 = 0, f_2 = 0^{i-1}1, f_n = f_{n-1} f_{n-2}.
//
// Words are stored one bit per symbol, LSB-first inside 64-bit limbs, so that
// orders in the mid-thirties (tens of millions of symbols) stay cheap.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fibfrac/error.hpp"

namespace fibfrac {

class Word {
 public:
  Word() = default;

  /// Parses ASCII '0'/'1'; anything else is a domain error.
  explicit Word(std::string_view symbols, int family = 0, int order = 0)
      : family_(family), order_(order) {
    reserve(symbols.size());
    for (char c : symbols) {
      if (c != '0' && c != '1') throw DomainError("word symbols must be '0' or '1'");
      push_back(c == '1');
    }
  }

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }

  /// Family index i and order n; 0 when the word was not produced by a generator.
  int family() const noexcept { return family_; }
  int order() const noexcept { return order_; }
  void set_tag(int family, int order) noexcept {
    family_ = family;
    order_ = order;
  }

  /// Symbol at 0-based position (0 or 1).
  int operator[](std::size_t pos) const noexcept {
    return static_cast<int>((limbs_[pos >> 6] >> (pos & 63)) & 1u);
  }

  void reserve(std::size_t n) { limbs_.reserve((n + 63) / 64); }

  void push_back(bool bit) {
    if ((size_ & 63) == 0) limbs_.push_back(0);
    if (bit) limbs_.back() |= std::uint64_t{1} << (size_ & 63);
    ++size_;
  }

  void append(const Word& other) {
    if (other.size_ == 0) return;
    const unsigned shift = size_ & 63;
    reserve(size_ + other.size_);
    if (shift == 0) {
      limbs_.insert(limbs_.end(), other.limbs_.begin(), other.limbs_.end());
    } else {
      for (std::uint64_t limb : other.limbs_) {
        limbs_.back() |= limb << shift;
        limbs_.push_back(limb >> (64 - shift));
      }
    }
    size_ += other.size_;
    limbs_.resize((size_ + 63) / 64);
    clear_padding();
  }

  Word slice(std::size_t begin, std::size_t length) const {
    if (begin > size_ || length > size_ - begin) throw DomainError("slice out of range");
    Word out;
    out.reserve(length);
    for (std::size_t k = 0; k < length; ++k) out.push_back((*this)[begin + k] != 0);
    return out;
  }

  std::string to_string() const {
    std::string s(size_, '0');
    for (std::size_t k = 0; k < size_; ++k)
      if ((*this)[k]) s[k] = '1';
    return s;
  }

  /// Length of the longest common prefix.
  std::size_t common_prefix(const Word& other) const noexcept {
    const std::size_t n = std::min(size_, other.size_);
    const std::size_t full = n / 64;
    for (std::size_t k = 0; k < full; ++k) {
      const std::uint64_t diff = limbs_[k] ^ other.limbs_[k];
      if (diff) return k * 64 + static_cast<std::size_t>(std::countr_zero(diff));
    }
    if (n & 63) {
      const std::uint64_t diff = limbs_[full] ^ other.limbs_[full];
      const std::uint64_t mask = (std::uint64_t{1} << (n & 63)) - 1;
      if (diff & mask) return full * 64 + static_cast<std::size_t>(std::countr_zero(diff & mask));
    }
    return n;
  }

  const std::vector<std::uint64_t>& limbs() const noexcept { return limbs_; }

  /// Symbol equality; tags are metadata and do not participate.
  friend bool operator==(const Word& a, const Word& b) noexcept {
    return a.size_ == b.size_ && a.limbs_ == b.limbs_;
  }

 private:
  void clear_padding() noexcept {
    if (size_ & 63) limbs_.back() &= (std::uint64_t{1} << (size_ & 63)) - 1;
  }

  std::vector<std::uint64_t> limbs_;
  std::size_t size_ = 0;
  int family_ = 0;
  int order_ = 0;
};

namespace detail {

inline void check_family(int i, int n) {
  require(i >= 2, "family index i must be >= 2");
  require(n >= 1, "word order n must be >= 1");
}

}  // namespace detail

/// |f_n^[i]|: 1, i, i+1, 2i+1, ...
inline std::uint64_t fib_length(int i, int n) {
  detail::check_family(i, n);
  if (n == 1) return 1;
  std::uint64_t prev = 1;
  std::uint64_t cur = static_cast<std::uint64_t>(i);
  for (int m = 3; m <= n; ++m) {
    if (cur > std::numeric_limits<std::uint64_t>::max() - prev)
      throw OverflowError("fib_length overflows 64-bit for i=" + std::to_string(i) +
                          ", n=" + std::to_string(n));
    const std::uint64_t next = cur + prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

/// f_2 = 0^{i-1}1.
inline Word second_word(int i) {
  Word w;
  w.reserve(static_cast<std::size_t>(i));
  for (int k = 0; k + 1 < i; ++k) w.push_back(false);
  w.push_back(true);
  return w;
}

/// Bottom-up concatenation f_n = f_{n-1} f_{n-2}.
inline Word word_concat(int i, int n) {
  const std::uint64_t len = fib_length(i, n);
  if (len > std::numeric_limits<std::size_t>::max() / 2)
    throw OverflowError("word too long to materialize");
  Word older("0");
  if (n == 1) {
    older.set_tag(i, 1);
    return older;
  }
  Word newer = second_word(i);
  for (int m = 3; m <= n; ++m) {
    Word next = newer;
    next.append(older);
    older = std::move(newer);
    newer = std::move(next);
  }
  newer.set_tag(i, n);
  return newer;
}

// --- substitution X_i ------------------------------------------------------

/// Block tags of the substitution alphabet: Short = "0", Long = "0^{i-1}1".
enum class Block : std::uint8_t { Short, Long };

struct BlockSeq {
  int i = 2;
  std::vector<Block> blocks;

  std::size_t symbol_count() const noexcept {
    std::size_t n = 0;
    for (Block b : blocks) n += (b == Block::Short) ? 1 : static_cast<std::size_t>(i);
    return n;
  }

  Word flatten() const {
    detail::require(i >= 2, "block sequence needs i >= 2");
    Word w;
    w.reserve(symbol_count());
    for (Block b : blocks) {
      if (b == Block::Short) {
        w.push_back(false);
      } else {
        for (int k = 0; k + 1 < i; ++k) w.push_back(false);
        w.push_back(true);
      }
    }
    return w;
  }
};

/// One application of X_i: Short -> Long, Long -> Long Short.
inline BlockSeq substitute(const BlockSeq& b) {
  detail::require(b.i >= 2, "block sequence needs i >= 2");
  BlockSeq out{b.i, {}};
  std::size_t longs = 0;
  for (Block t : b.blocks) longs += (t == Block::Long);
  out.blocks.reserve(b.blocks.size() + longs);
  for (Block t : b.blocks) {
    out.blocks.push_back(Block::Long);
    if (t == Block::Long) out.blocks.push_back(Block::Short);
  }
  return out;
}

/// Block decomposition of f_n as produced by n-1 substitutions of f_1 = [Short].
inline BlockSeq blocks_of(int i, int n) {
  detail::check_family(i, n);
  BlockSeq b{i, {Block::Short}};
  for (int k = 1; k < n; ++k) b = substitute(b);
  return b;
}

inline Word word_by_substitution(int i, int n) {
  (void)fib_length(i, n);  // domain and overflow checks
  Word w = blocks_of(i, n).flatten();
  w.set_tag(i, n);
  return w;
}

// --- metric and structure ------------------------------------------------

/// 2^-L with L the longest common prefix; 0 for identical sequences.
inline double two_adic_distance(const Word& w, const Word& v) {
  if (w == v) return 0.0;
  return std::ldexp(1.0, -static_cast<int>(std::min<std::size_t>(w.common_prefix(v), 2000)));
}

inline double two_adic_distance(std::string_view w, std::string_view v) {
  if (w == v) return 0.0;
  std::size_t l = 0;
  while (l < w.size() && l < v.size() && w[l] == v[l]) ++l;
  return std::ldexp(1.0, -static_cast<int>(std::min<std::size_t>(l, 2000)));
}

inline bool contains_11(const Word& w) {
  const auto& limbs = w.limbs();
  for (std::size_t k = 0; k < limbs.size(); ++k) {
    if (limbs[k] & (limbs[k] >> 1)) return true;
    if (k + 1 < limbs.size() && (limbs[k] >> 63) && (limbs[k + 1] & 1u)) return true;
  }
  return false;
}

/// Half-open symbol range [begin, begin + length).
struct SymbolRange {
  std::size_t begin = 0;
  std::size_t length = 0;
  std::size_t end() const noexcept { return begin + length; }
};

enum class PartKind : std::uint8_t { Prefix3, Prefix6, Swapped3 };

/// f_n = f_{n-3} f_{n-3} f_{n-6} l_{n-3} l_{n-3}, l_m = f_m with its last two
/// symbols swapped.
struct FivePartite {
  int i = 2;
  int n = 7;
  std::array<SymbolRange, 5> parts{};
  static constexpr std::array<PartKind, 5> kinds{PartKind::Prefix3, PartKind::Prefix3,
                                                 PartKind::Prefix6, PartKind::Swapped3,
                                                 PartKind::Swapped3};
  /// Word order of each part (n-3 or n-6).
  int part_order(std::size_t k) const noexcept { return kinds[k] == PartKind::Prefix6 ? n - 6 : n - 3; }
};

inline FivePartite five_partite(int i, int n) {
  detail::check_family(i, n);
  detail::require(n >= 7, "five-partite structure needs n >= 7");
  const std::size_t l3 = fib_length(i, n - 3);
  const std::size_t l6 = fib_length(i, n - 6);
  FivePartite fp{i, n, {}};
  const std::array<std::size_t, 5> lens{l3, l3, l6, l3, l3};
  std::size_t at = 0;
  for (std::size_t k = 0; k < 5; ++k) {
    fp.parts[k] = {at, lens[k]};
    at += lens[k];
  }
  return fp;
}

inline Word swap_last_two(Word w) {
  detail::require(w.size() >= 2, "need at least two symbols");
  const std::size_t n = w.size();
  Word out = w.slice(0, n - 2);
  out.push_back(w[n - 1] != 0);
  out.push_back(w[n - 2] != 0);
  out.set_tag(w.family(), w.order());
  return out;
}

/// Checks every part of `fp` against independently generated f_{n-3}, f_{n-6}
/// and l_{n-3}; throws StructureError on the first mismatch.
inline void check_five_partite(const Word& w, const FivePartite& fp) {
  if (fp.parts[4].end() != w.size()) throw StructureError("five-partite ranges do not cover the word");
  const Word f3 = word_concat(fp.i, fp.n - 3);
  const Word f6 = word_concat(fp.i, fp.n - 6);
  const Word l3 = swap_last_two(f3);
  for (std::size_t k = 0; k < 5; ++k) {
    const Word& expect = FivePartite::kinds[k] == PartKind::Prefix3   ? f3
                         : FivePartite::kinds[k] == PartKind::Prefix6 ? f6
                                                                      : l3;
    if (!(w.slice(fp.parts[k].begin, fp.parts[k].length) == expect))
      throw StructureError("five-partite part " + std::to_string(k + 1) + " mismatch");
  }
}

struct PalindromeSplit {
  std::string palindrome;  // p_n
  std::string tail;        // ab, "01" or "10"
};

inline PalindromeSplit palindrome_decomposition(const Word& w) {
  detail::require(w.size() >= 2, "palindrome decomposition needs |w| >= 2");
  std::string s = w.to_string();
  PalindromeSplit out{s.substr(0, s.size() - 2), s.substr(s.size() - 2)};
  if (!std::equal(out.palindrome.begin(), out.palindrome.begin() + out.palindrome.size() / 2,
                  out.palindrome.rbegin()))
    throw StructureError("prefix is not a palindrome");
  if (out.tail != "01" && out.tail != "10") throw StructureError("tail must be 01 or 10, got " + out.tail);
  return out;
}

/// Observed tail `ab` per parity of n over orders [2, n_max] of family i.
struct ParityTails {
  int i = 2;
  std::optional<std::string> even_tail;
  std::optional<std::string> odd_tail;
  bool consistent = true;  // each parity always produced the same tail
};

inline ParityTails observe_parity_tails(int i, int n_max) {
  ParityTails out{i, {}, {}, true};
  for (int n = 2; n <= n_max; ++n) {
    const std::string tail = palindrome_decomposition(word_concat(i, n)).tail;
    auto& slot = (n % 2 == 0) ? out.even_tail : out.odd_tail;
    if (!slot) slot = tail;
    else if (*slot != tail) out.consistent = false;
  }
  return out;
}

}  // namespace fibfrac
