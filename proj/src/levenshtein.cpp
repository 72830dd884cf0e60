#include "bitext/levenshtein.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "bitext/utf8.hpp"

namespace bitext {
namespace {

// Match masks for one 64-row block of the pattern: bit r set when pattern row
// r holds the codepoint.
class BlockMasks {
 public:
  void set(char32_t cp, int row) {
    const std::uint64_t bit = std::uint64_t{1} << row;
    if (cp < 128) {
      ascii_[cp] |= bit;
      return;
    }
    for (auto& [c, m] : other_)
      if (c == cp) {
        m |= bit;
        return;
      }
    other_.emplace_back(cp, bit);
  }

  std::uint64_t get(char32_t cp) const {
    if (cp < 128) return ascii_[cp];
    for (const auto& [c, m] : other_)
      if (c == cp) return m;
    return 0;
  }

 private:
  std::array<std::uint64_t, 128> ascii_{};
  std::vector<std::pair<char32_t, std::uint64_t>> other_;
};

struct BlockState {
  std::uint64_t pv = ~std::uint64_t{0};
  std::uint64_t mv = 0;
};

// Advances one block by one text column. `hin` is the horizontal delta
// entering from the block above (+1 for the top block); returns the delta
// leaving through `out_bit`.
int advance(BlockState& s, std::uint64_t eq, int hin, std::uint64_t out_bit) {
  const std::uint64_t xv = eq | s.mv;
  if (hin < 0) eq |= 1;
  const std::uint64_t xh = (((eq & s.pv) + s.pv) ^ s.pv) | eq;
  std::uint64_t ph = s.mv | ~(xh | s.pv);
  std::uint64_t mh = s.pv & xh;
  int hout = 0;
  if (ph & out_bit) hout = 1;
  if (mh & out_bit) hout = -1;
  ph <<= 1;
  mh <<= 1;
  if (hin < 0)
    mh |= 1;
  else if (hin > 0)
    ph |= 1;
  s.pv = mh | ~(xv | ph);
  s.mv = ph & xv;
  return hout;
}

}  // namespace

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  // Pattern = shorter string (rows), text = longer (columns).
  if (a.size() > b.size()) std::swap(a, b);
  const std::size_t m = a.size();
  if (m == 0) return b.size();

  // Common prefix/suffix never change the distance.
  std::size_t pre = 0;
  while (pre < m && a[pre] == b[pre]) ++pre;
  a.remove_prefix(pre);
  b.remove_prefix(pre);
  std::size_t suf = 0;
  while (suf < a.size() && a[a.size() - 1 - suf] == b[b.size() - 1 - suf]) ++suf;
  a.remove_suffix(suf);
  b.remove_suffix(suf);
  if (a.empty()) return b.size();

  const std::size_t rows = a.size();
  const std::size_t blocks = (rows + 63) / 64;
  std::vector<BlockMasks> masks(blocks);
  for (std::size_t r = 0; r < rows; ++r) masks[r / 64].set(a[r], static_cast<int>(r % 64));
  std::vector<BlockState> state(blocks);

  const std::uint64_t last_bit = std::uint64_t{1} << ((rows - 1) % 64);
  constexpr std::uint64_t kHigh = std::uint64_t{1} << 63;
  std::size_t score = rows;
  for (char32_t c : b) {
    int carry = 1;
    for (std::size_t k = 0; k + 1 < blocks; ++k) carry = advance(state[k], masks[k].get(c), carry, kHigh);
    carry = advance(state[blocks - 1], masks[blocks - 1].get(c), carry, last_bit);
    score = static_cast<std::size_t>(static_cast<long long>(score) + carry);
  }
  return score;
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  return levenshtein(utf8::decode(a), utf8::decode(b));
}

}  // namespace bitext
