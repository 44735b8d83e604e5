#pragma once

#include <string>
#include <utility>
#include <vector>

namespace gnl {

/// Perfect matching of {1, ..., p}; pairs are (lo, hi) with lo < hi, listed
/// in increasing order of lo. Indices are 1-based throughout.
struct PairPartition {
  int p = 0;
  std::vector<std::pair<int, int>> pairs;
};

/// Partition of an arbitrary sorted ground set into blocks; every block is
/// sorted and blocks are ordered by their smallest element.
struct SetPartition {
  std::vector<int> ground;
  std::vector<std::vector<int>> blocks;
};

/// Validates and canonicalizes a pair partition of [p].
PairPartition pair_partition(int p, std::vector<std::pair<int, int>> pairs);

/// Validates and canonicalizes a set partition.
SetPartition set_partition(std::vector<int> ground,
                           std::vector<std::vector<int>> blocks);

SetPartition as_set_partition(const PairPartition& nu);

bool operator==(const SetPartition& a, const SetPartition& b);

/// Render as {1,3}{2,4}; used by tests and the fiber dump.
std::string to_string(const PairPartition& nu);
std::string to_string(const SetPartition& s);

/// All pair partitions of [p] for even p in [2, 14]. Generation order:
/// the smallest unpaired element is matched with every larger unpaired
/// element in increasing order, recursing left to right. The count is
/// (p - 1)!!.
std::vector<PairPartition> enum_pair_partitions(int p);

/// True when no two pairs (a1,b1), (a2,b2) interleave as a1 < a2 < b1 < b2.
bool is_noncrossing(const PairPartition& nu);

/// Refinement order: every block of a is contained in one block of b.
/// Both arguments must share the same ground set.
bool leq(const SetPartition& a, const SetPartition& b);
bool leq(const PairPartition& a, const SetPartition& b);

/// S(nu, k): union of all blocks of nu meeting {1, ..., k}, sorted.
std::vector<int> connected_span(const PairPartition& nu, int k);

/// Largest k such that nu restricted to S(nu, k) is noncrossing. Defined
/// only for crossing nu (throws std::invalid_argument otherwise); the value
/// is in [1, p - 1].
int crossing_depth(const PairPartition& nu);

/// The coarsening map on crossing pair partitions: keep the pairs inside
/// S(nu, crossing_depth(nu) + 1) and merge everything outside into a single
/// block (dropped when empty).
SetPartition phi(const PairPartition& nu);

/// Distinct images of phi over all crossing pair partitions of [p],
/// p even in [4, 12], in first-appearance order.
std::vector<SetPartition> phi_fibers(int p);

/// Restriction of s to a subset of its ground set; original labels are
/// kept and empty intersections are dropped.
SetPartition restrict_to(const SetPartition& s, const std::vector<int>& subset);
SetPartition restrict_to(const PairPartition& nu, const std::vector<int>& subset);

}  // namespace gnl
