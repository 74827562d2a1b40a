#include "freeprob/nc_lattice.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <set>
#include <string>

namespace freeprob {

long long catalan(int n) {
  static const std::vector<long long> table = [] {
    std::vector<long long> c(31);
    c[0] = 1;
    for (int i = 1; i <= 30; ++i) {
      c[i] = 0;
      for (int j = 0; j < i; ++j) c[i] += c[j] * c[i - 1 - j];
    }
    return c;
  }();
  if (n < 0 || n > 30) throw std::domain_error("catalan: n out of range");
  return table[n];
}

}  // namespace freeprob

namespace freeprob::nc {

bool NCPartition::operator<(const NCPartition& other) const {
  if (r != other.r) return r < other.r;
  return blocks < other.blocks;
}

static void canonicalize(std::vector<std::vector<int>>& blocks) {
  for (auto& b : blocks) std::sort(b.begin(), b.end());
  std::sort(blocks.begin(), blocks.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
}

bool is_partition(const std::vector<std::vector<int>>& blocks) {
  std::set<int> seen;
  int count = 0;
  for (const auto& b : blocks) {
    if (b.empty()) return false;
    for (int x : b) {
      if (x < 1 || !seen.insert(x).second) return false;
      ++count;
    }
  }
  return !seen.empty() && *seen.rbegin() == count;
}

bool is_noncrossing(const std::vector<std::vector<int>>& blocks) {
  if (!is_partition(blocks)) throw std::domain_error("is_noncrossing: input is not a partition of {1..r}");
  int r = 0;
  for (const auto& b : blocks) r += static_cast<int>(b.size());
  // block id and last element per position
  std::vector<int> block_of(r + 1), last_of_block(blocks.size());
  for (size_t i = 0; i < blocks.size(); ++i) {
    int last = 0;
    for (int x : blocks[i]) {
      block_of[x] = static_cast<int>(i);
      last = std::max(last, x);
    }
    last_of_block[i] = last;
  }
  // stack discipline: a block interrupted before its last element crosses
  std::vector<int> stack;
  std::vector<bool> open(blocks.size(), false);
  for (int x = 1; x <= r; ++x) {
    int b = block_of[x];
    if (!open[b]) {
      open[b] = true;
      stack.push_back(b);
    }
    if (stack.back() != b) return false;
    if (x == last_of_block[b]) stack.pop_back();
  }
  return true;
}

NCPartition NCPartition::from_blocks(int r, std::vector<std::vector<int>> blocks) {
  if (!is_partition(blocks)) throw std::domain_error("NCPartition: blocks do not partition {1..r}");
  int total = 0;
  for (const auto& b : blocks) total += static_cast<int>(b.size());
  if (total != r) throw std::domain_error("NCPartition: ground-set size mismatch");
  if (!is_noncrossing(blocks)) throw std::domain_error("NCPartition: crossing blocks");
  canonicalize(blocks);
  return NCPartition{r, std::move(blocks)};
}

NCPartition NCPartition::singletons(int r) {
  NCPartition p{r, {}};
  for (int i = 1; i <= r; ++i) p.blocks.push_back({i});
  return p;
}

NCPartition NCPartition::full_block(int r) {
  NCPartition p{r, {std::vector<int>()}};
  for (int i = 1; i <= r; ++i) p.blocks[0].push_back(i);
  return p;
}

namespace {

// Backtracking enumeration: scan 1..r keeping a stack of open blocks.  An
// element either opens a new block or joins an open block, permanently
// closing every block above it (anything else would cross).
void enumerate_rec(int i, int r, std::vector<std::vector<int>>& open,
                   std::vector<std::vector<int>>& closed,
                   std::vector<NCPartition>& out) {
  if (i > r) {
    std::vector<std::vector<int>> blocks = closed;
    blocks.insert(blocks.end(), open.begin(), open.end());
    canonicalize(blocks);
    out.push_back(NCPartition{r, std::move(blocks)});
    return;
  }
  // new block
  open.push_back({i});
  enumerate_rec(i + 1, r, open, closed, out);
  open.pop_back();
  // join open block at depth k, closing everything above
  for (int k = static_cast<int>(open.size()) - 1; k >= 0; --k) {
    std::vector<std::vector<int>> tail(open.begin() + k + 1, open.end());
    const size_t closed0 = closed.size();
    closed.insert(closed.end(), tail.begin(), tail.end());
    open.resize(k + 1);
    open[k].push_back(i);
    enumerate_rec(i + 1, r, open, closed, out);
    open[k].pop_back();
    open.insert(open.end(), tail.begin(), tail.end());
    closed.resize(closed0);
  }
}

}  // namespace

const std::vector<NCPartition>& enumerate_nc(int r, int r_max) {
  if (r < 1 || r > r_max)
    throw std::domain_error("enumerate_nc: r = " + std::to_string(r) +
                            " outside [1, " + std::to_string(r_max) + "]");
  static std::map<int, std::vector<NCPartition>> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(r);
  if (it != cache.end()) return it->second;
  std::vector<NCPartition> out;
  out.reserve(static_cast<size_t>(catalan(r)));
  std::vector<std::vector<int>> open, closed;
  enumerate_rec(1, r, open, closed, out);
  std::sort(out.begin(), out.end());
  return cache.emplace(r, std::move(out)).first->second;
}

bool leq(const NCPartition& sigma, const NCPartition& pi) {
  if (sigma.r != pi.r) throw std::domain_error("leq: mismatched ground sets");
  std::vector<int> block_of(pi.r + 1);
  for (size_t i = 0; i < pi.blocks.size(); ++i)
    for (int x : pi.blocks[i]) block_of[x] = static_cast<int>(i);
  for (const auto& b : sigma.blocks) {
    int target = block_of[b.front()];
    for (int x : b)
      if (block_of[x] != target) return false;
  }
  return true;
}

NCPartition kreweras(const NCPartition& pi) {
  const int r = pi.r;
  std::vector<int> p_inv(r + 1);
  for (const auto& b : pi.blocks) {
    for (size_t j = 0; j < b.size(); ++j) {
      int from = b[j];
      int to = b[(j + 1) % b.size()];
      p_inv[to] = from;
    }
  }
  std::vector<bool> used(r + 1, false);
  std::vector<std::vector<int>> blocks;
  for (int start = 1; start <= r; ++start) {
    if (used[start]) continue;
    std::vector<int> cycle;
    int x = start;
    do {
      used[x] = true;
      cycle.push_back(x);
      x = p_inv[x % r + 1];  // p^{-1}(gamma(x))
    } while (x != start);
    blocks.push_back(std::move(cycle));
  }
  canonicalize(blocks);
  return NCPartition{r, std::move(blocks)};
}

long long moebius_to_top(const NCPartition& pi) {
  NCPartition k = kreweras(pi);
  long long mu = 1;
  for (const auto& b : k.blocks) {
    int s = static_cast<int>(b.size());
    mu *= catalan(s - 1);
    if ((s - 1) % 2 != 0) mu = -mu;
  }
  return mu;
}

}  // namespace freeprob::nc
