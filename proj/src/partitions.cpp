#include "gnl/partitions.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace gnl {

namespace {

void check_even_p(int p, int lo, int hi) {
  if (p < lo || p > hi || p % 2 != 0)
    throw std::invalid_argument("order p must be even and in [" +
                                std::to_string(lo) + ", " + std::to_string(hi) +
                                "]");
}

// partner[i] for 1-based i; 0 when absent.
std::vector<int> partner_map(const PairPartition& nu) {
  std::vector<int> partner(static_cast<std::size_t>(nu.p) + 1, 0);
  for (auto [a, b] : nu.pairs) {
    partner[static_cast<std::size_t>(a)] = b;
    partner[static_cast<std::size_t>(b)] = a;
  }
  return partner;
}

}  // namespace

PairPartition pair_partition(int p, std::vector<std::pair<int, int>> pairs) {
  if (p <= 0 || p % 2 != 0)
    throw std::invalid_argument("pair_partition: p must be positive and even");
  if (pairs.size() != static_cast<std::size_t>(p) / 2)
    throw std::invalid_argument("pair_partition: need exactly p/2 pairs");
  std::vector<char> seen(static_cast<std::size_t>(p) + 1, 0);
  for (auto& pr : pairs) {
    if (pr.first > pr.second) std::swap(pr.first, pr.second);
    for (int v : {pr.first, pr.second}) {
      if (v < 1 || v > p)
        throw std::invalid_argument("pair_partition: index out of range");
      if (seen[static_cast<std::size_t>(v)])
        throw std::invalid_argument("pair_partition: repeated index");
      seen[static_cast<std::size_t>(v)] = 1;
    }
    if (pr.first == pr.second)
      throw std::invalid_argument("pair_partition: degenerate pair");
  }
  std::sort(pairs.begin(), pairs.end());
  return {p, std::move(pairs)};
}

SetPartition set_partition(std::vector<int> ground,
                           std::vector<std::vector<int>> blocks) {
  std::sort(ground.begin(), ground.end());
  if (std::adjacent_find(ground.begin(), ground.end()) != ground.end())
    throw std::invalid_argument("set_partition: repeated ground element");
  std::size_t total = 0;
  for (auto& b : blocks) {
    if (b.empty()) throw std::invalid_argument("set_partition: empty block");
    std::sort(b.begin(), b.end());
    for (int v : b)
      if (!std::binary_search(ground.begin(), ground.end(), v))
        throw std::invalid_argument("set_partition: element not in ground set");
    total += b.size();
  }
  if (total != ground.size())
    throw std::invalid_argument("set_partition: blocks do not partition ground");
  std::vector<char> seen(ground.size(), 0);
  for (const auto& b : blocks)
    for (int v : b) {
      const auto idx = static_cast<std::size_t>(
          std::lower_bound(ground.begin(), ground.end(), v) - ground.begin());
      if (seen[idx])
        throw std::invalid_argument("set_partition: blocks overlap");
      seen[idx] = 1;
    }
  std::sort(blocks.begin(), blocks.end(),
            [](const auto& a, const auto& b) { return a[0] < b[0]; });
  return {std::move(ground), std::move(blocks)};
}

SetPartition as_set_partition(const PairPartition& nu) {
  std::vector<int> ground(static_cast<std::size_t>(nu.p));
  for (int i = 1; i <= nu.p; ++i) ground[static_cast<std::size_t>(i - 1)] = i;
  std::vector<std::vector<int>> blocks;
  blocks.reserve(nu.pairs.size());
  for (auto [a, b] : nu.pairs) blocks.push_back({a, b});
  return {std::move(ground), std::move(blocks)};
}

bool operator==(const SetPartition& a, const SetPartition& b) {
  return a.ground == b.ground && a.blocks == b.blocks;
}

std::string to_string(const PairPartition& nu) {
  return to_string(as_set_partition(nu));
}

std::string to_string(const SetPartition& s) {
  std::ostringstream out;
  for (const auto& b : s.blocks) {
    out << '{';
    for (std::size_t i = 0; i < b.size(); ++i) {
      if (i) out << ',';
      out << b[i];
    }
    out << '}';
  }
  return out.str();
}

namespace {

void enum_rec(int p, std::vector<char>& used,
              std::vector<std::pair<int, int>>& acc,
              std::vector<PairPartition>& out) {
  int lo = 0;
  for (int i = 1; i <= p; ++i)
    if (!used[static_cast<std::size_t>(i)]) {
      lo = i;
      break;
    }
  if (lo == 0) {
    out.push_back({p, acc});
    return;
  }
  used[static_cast<std::size_t>(lo)] = 1;
  for (int hi = lo + 1; hi <= p; ++hi) {
    if (used[static_cast<std::size_t>(hi)]) continue;
    used[static_cast<std::size_t>(hi)] = 1;
    acc.emplace_back(lo, hi);
    enum_rec(p, used, acc, out);
    acc.pop_back();
    used[static_cast<std::size_t>(hi)] = 0;
  }
  used[static_cast<std::size_t>(lo)] = 0;
}

}  // namespace

std::vector<PairPartition> enum_pair_partitions(int p) {
  check_even_p(p, 2, 14);
  std::vector<PairPartition> out;
  std::vector<char> used(static_cast<std::size_t>(p) + 1, 0);
  std::vector<std::pair<int, int>> acc;
  acc.reserve(static_cast<std::size_t>(p) / 2);
  enum_rec(p, used, acc, out);
  return out;
}

bool is_noncrossing(const PairPartition& nu) {
  const auto& ps = nu.pairs;
  for (std::size_t i = 0; i < ps.size(); ++i)
    for (std::size_t j = i + 1; j < ps.size(); ++j) {
      // ps sorted by first element, so ps[i].first < ps[j].first.
      if (ps[j].first < ps[i].second && ps[i].second < ps[j].second)
        return false;
    }
  return true;
}

namespace {

bool pairs_noncrossing(const std::vector<std::pair<int, int>>& ps) {
  for (std::size_t i = 0; i < ps.size(); ++i)
    for (std::size_t j = 0; j < ps.size(); ++j) {
      if (i == j) continue;
      if (ps[i].first < ps[j].first && ps[j].first < ps[i].second &&
          ps[i].second < ps[j].second)
        return false;
    }
  return true;
}

}  // namespace

bool leq(const SetPartition& a, const SetPartition& b) {
  if (a.ground != b.ground)
    throw std::invalid_argument("leq: ground sets differ");
  std::map<int, int> block_of;
  for (std::size_t bi = 0; bi < b.blocks.size(); ++bi)
    for (int v : b.blocks[bi]) block_of[v] = static_cast<int>(bi);
  for (const auto& blk : a.blocks) {
    const int target = block_of.at(blk[0]);
    for (int v : blk)
      if (block_of.at(v) != target) return false;
  }
  return true;
}

bool leq(const PairPartition& a, const SetPartition& b) {
  return leq(as_set_partition(a), b);
}

std::vector<int> connected_span(const PairPartition& nu, int k) {
  if (k < 1 || k > nu.p)
    throw std::invalid_argument("connected_span: k out of range");
  const auto partner = partner_map(nu);
  std::vector<char> in(static_cast<std::size_t>(nu.p) + 1, 0);
  for (int i = 1; i <= k; ++i) {
    in[static_cast<std::size_t>(i)] = 1;
    in[static_cast<std::size_t>(partner[static_cast<std::size_t>(i)])] = 1;
  }
  std::vector<int> s;
  for (int i = 1; i <= nu.p; ++i)
    if (in[static_cast<std::size_t>(i)]) s.push_back(i);
  return s;
}

namespace {

// Pairs of nu lying inside the span set (the span always splits nu).
std::vector<std::pair<int, int>> pairs_within(const PairPartition& nu,
                                              const std::vector<int>& span) {
  std::vector<std::pair<int, int>> out;
  for (auto pr : nu.pairs)
    if (std::binary_search(span.begin(), span.end(), pr.first))
      out.push_back(pr);
  return out;
}

}  // namespace

int crossing_depth(const PairPartition& nu) {
  if (is_noncrossing(nu))
    throw std::invalid_argument("crossing_depth: partition is noncrossing");
  int best = 0;
  for (int k = 1; k <= nu.p; ++k) {
    const auto span = connected_span(nu, k);
    if (pairs_noncrossing(pairs_within(nu, span)))
      best = k;
    else
      break;  // spans grow with k, so crossing persists
  }
  return best;
}

SetPartition phi(const PairPartition& nu) {
  const int k = crossing_depth(nu);
  const auto span = connected_span(nu, k + 1);
  std::vector<std::vector<int>> blocks;
  for (auto pr : pairs_within(nu, span)) blocks.push_back({pr.first, pr.second});
  std::vector<int> rest;
  for (int i = 1; i <= nu.p; ++i)
    if (!std::binary_search(span.begin(), span.end(), i)) rest.push_back(i);
  if (!rest.empty()) blocks.push_back(std::move(rest));
  std::vector<int> ground(static_cast<std::size_t>(nu.p));
  for (int i = 1; i <= nu.p; ++i) ground[static_cast<std::size_t>(i - 1)] = i;
  return set_partition(std::move(ground), std::move(blocks));
}

std::vector<SetPartition> phi_fibers(int p) {
  check_even_p(p, 4, 12);
  std::vector<SetPartition> fibers;
  for (const auto& nu : enum_pair_partitions(p)) {
    if (is_noncrossing(nu)) continue;
    SetPartition image = phi(nu);
    if (std::find(fibers.begin(), fibers.end(), image) == fibers.end())
      fibers.push_back(std::move(image));
  }
  return fibers;
}

SetPartition restrict_to(const SetPartition& s, const std::vector<int>& subset) {
  std::vector<int> sub = subset;
  std::sort(sub.begin(), sub.end());
  for (int v : sub)
    if (!std::binary_search(s.ground.begin(), s.ground.end(), v))
      throw std::invalid_argument("restrict_to: subset leaves the ground set");
  std::vector<std::vector<int>> blocks;
  for (const auto& b : s.blocks) {
    std::vector<int> cut;
    for (int v : b)
      if (std::binary_search(sub.begin(), sub.end(), v)) cut.push_back(v);
    if (!cut.empty()) blocks.push_back(std::move(cut));
  }
  return set_partition(std::move(sub), std::move(blocks));
}

SetPartition restrict_to(const PairPartition& nu, const std::vector<int>& subset) {
  return restrict_to(as_set_partition(nu), subset);
}

}  // namespace gnl
