#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mmass/errors.hpp"

namespace mmass {

using SymbolId = std::uint64_t;

// Frequency-of-frequencies summary of a sample: n and M_{n,r} for every r
// with M_{n,r} > 0. Immutable once built.
class SampleProfile {
 public:
  SampleProfile() = default;

  // Per-symbol occurrence counts; zero entries are ignored.
  static SampleProfile from_symbol_counts(std::span<const std::uint64_t> counts) {
    SampleProfile p;
    for (const auto c : counts) {
      if (c == 0) continue;
      ++p.m_[c];
      p.n_ += c;
    }
    return p;
  }

  // Any sequence of equality-comparable, hashable labels.
  template <class Range>
  static SampleProfile from_sample(const Range& labels) {
    using Label = std::decay_t<decltype(*std::begin(labels))>;
    std::unordered_map<Label, std::uint64_t> tally;
    for (const auto& l : labels) ++tally[l];
    std::vector<std::uint64_t> counts;
    counts.reserve(tally.size());
    for (const auto& [label, c] : tally) counts.push_back(c);
    return from_symbol_counts(counts);
  }

  std::uint64_t n() const { return n_; }

  // M_{n,r}: symbols seen exactly r times.
  std::uint64_t m_r(std::uint64_t r) const {
    require(r >= 1, "m_r: r must be >= 1");
    const auto it = m_.find(r);
    return it == m_.end() ? 0 : it->second;
  }

  // C_{n,r}: symbols seen at least r times.
  std::uint64_t c_r(std::uint64_t r) const {
    require(r >= 1, "c_r: r must be >= 1");
    std::uint64_t total = 0;
    for (auto it = m_.lower_bound(r); it != m_.end(); ++it) total += it->second;
    return total;
  }

  // K_n, the number of distinct symbols.
  std::uint64_t distinct() const { return c_r(1); }

  const std::map<std::uint64_t, std::uint64_t>& frequencies() const { return m_; }

  friend bool operator==(const SampleProfile&, const SampleProfile&) = default;

 private:
  std::uint64_t n_ = 0;
  std::map<std::uint64_t, std::uint64_t> m_;
};

// Sorted distinct symbol ids of a sample with their counts.
struct Tally {
  std::vector<SymbolId> ids;
  std::vector<std::uint64_t> counts;

  SampleProfile profile() const { return SampleProfile::from_symbol_counts(counts); }
};

inline Tally tally(std::vector<SymbolId> sample) {
  std::sort(sample.begin(), sample.end());
  Tally t;
  for (std::size_t i = 0; i < sample.size();) {
    std::size_t j = i;
    while (j < sample.size() && sample[j] == sample[i]) ++j;
    t.ids.push_back(sample[i]);
    t.counts.push_back(j - i);
    i = j;
  }
  return t;
}

}  // namespace mmass
