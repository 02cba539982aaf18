#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "veronese/linalg.hpp"

namespace veronese::detail {

// C(n, k), saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

// Lexicographic rank of a k-subset (given as sorted positions in [0, n)).
std::uint64_t subset_rank(std::span<const std::size_t> positions, std::size_t n);

struct FirstDependent {
  // Lexicographically first dependent k-subset, as column indices.
  std::optional<std::vector<std::size_t>> subset;
  // Size of the shortest dependent prefix of `subset` (k when only the full
  // subset is dependent).
  std::size_t dependent_prefix = 0;
  // Subsets examined in lexicographic order: rank(subset) + 1, or all of them.
  std::uint64_t examined = 0;
  // True when the search stopped at the budget before reaching a verdict.
  bool budget_cut = false;
};

// Scans the k-subsets of `universe` (sorted column indices) in lexicographic
// order and stops at the first linearly dependent one. Work is split by the
// first element across `workers` threads; the answer is the same for every
// worker count. Subsets of lexicographic rank >= budget are not examined.
FirstDependent first_dependent(const ColumnStore& cols, const FieldCtx& f,
                               std::span<const std::size_t> universe, std::size_t k, unsigned workers,
                               std::uint64_t budget);

// Every dependent k-subset of `universe`, in lexicographic order. The caller
// checks the budget (binomial(|universe|, k)) beforehand.
std::vector<std::vector<std::size_t>> all_dependent(const ColumnStore& cols, const FieldCtx& f,
                                                    std::span<const std::size_t> universe, std::size_t k,
                                                    unsigned workers);

}  // namespace veronese::detail
