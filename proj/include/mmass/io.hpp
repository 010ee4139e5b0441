#pragma once

#include <charconv>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mmass/distributions.hpp"
#include "mmass/errors.hpp"
#include "mmass/profile.hpp"

namespace mmass {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

inline std::uint64_t parse_u64(std::string_view text, std::string_view what) {
  text = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
    throw parse_error(std::string(what) + ": expected a non-negative integer, got '" + std::string(text) + "'");
  return v;
}

inline double parse_double(std::string_view text, std::string_view what) {
  text = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
    throw parse_error(std::string(what) + ": expected a number, got '" + std::string(text) + "'");
  return v;
}

// One symbol per line; a trailing carriage return is dropped and blank lines
// are skipped.
inline SampleProfile read_raw_sample(std::istream& in) {
  std::unordered_map<std::string, std::uint64_t> tally;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++tally[line];
  }
  if (in.bad()) throw parse_error("failed to read sample input");
  std::vector<std::uint64_t> counts;
  counts.reserve(tally.size());
  for (const auto& [sym, c] : tally) counts.push_back(c);
  return SampleProfile::from_symbol_counts(counts);
}

// CSV with header `symbol,count`; repeated symbols accumulate.
inline SampleProfile read_counts_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw parse_error("counts file is empty; expected header 'symbol,count'");
  if (trim(line) != "symbol,count") throw parse_error("counts file header must be 'symbol,count'");
  std::map<std::string, std::uint64_t> counts;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto row = trim(line);
    if (row.empty()) continue;
    const auto comma = row.rfind(',');
    if (comma == std::string_view::npos || comma == 0)
      throw parse_error("line " + std::to_string(line_no) + ": expected 'symbol,count'");
    const auto c = parse_u64(row.substr(comma + 1), "line " + std::to_string(line_no));
    if (c == 0) throw parse_error("line " + std::to_string(line_no) + ": count must be positive");
    counts[std::string(row.substr(0, comma))] += c;
  }
  std::vector<std::uint64_t> values;
  values.reserve(counts.size());
  for (const auto& [sym, c] : counts) values.push_back(c);
  return SampleProfile::from_symbol_counts(values);
}

// `uniform:k=100`, `geometric:q=0.5`, `zipf:alpha=0.5[,J=1000]`,
// `lemma2:alpha=0.5,L=1`, `twopoint:omega=0.1`, `finite:p=0.2|0.3|0.5`.
inline DiscreteDistribution parse_distribution(std::string_view spec) {
  spec = trim(spec);
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) throw parse_error("distribution spec needs 'kind:key=value': " + std::string(spec));
  const std::string kind(trim(spec.substr(0, colon)));
  std::map<std::string, std::string, std::less<>> kv;
  for (const auto part : split(spec.substr(colon + 1), ',')) {
    const auto eq = part.find('=');
    if (eq == std::string_view::npos) throw parse_error("distribution parameter needs key=value: " + std::string(part));
    const std::string key(trim(part.substr(0, eq)));
    if (!kv.emplace(key, std::string(trim(part.substr(eq + 1)))).second)
      throw parse_error("repeated distribution parameter '" + key + "'");
  }
  const auto take = [&](std::string_view key) {
    const auto it = kv.find(key);
    if (it == kv.end()) throw parse_error(kind + ": missing parameter '" + std::string(key) + "'");
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  const auto done = [&] {
    if (!kv.empty()) throw parse_error(kind + ": unknown parameter '" + kv.begin()->first + "'");
  };

  if (kind == "uniform") {
    const auto k = parse_u64(take("k"), "uniform k");
    done();
    return DiscreteDistribution::uniform(k);
  }
  if (kind == "geometric") {
    const auto q = parse_double(take("q"), "geometric q");
    done();
    return DiscreteDistribution::geometric(q);
  }
  if (kind == "zipf") {
    const auto alpha = parse_double(take("alpha"), "zipf alpha");
    std::uint64_t truncation = DiscreteDistribution::kDefaultZipfTruncation;
    if (kv.count("J")) truncation = parse_u64(take("J"), "zipf J");
    done();
    return DiscreteDistribution::zipf(alpha, truncation);
  }
  if (kind == "lemma2") {
    const auto alpha = parse_double(take("alpha"), "lemma2 alpha");
    const auto L = parse_double(take("L"), "lemma2 L");
    done();
    return DiscreteDistribution::lemma2(alpha, L);
  }
  if (kind == "twopoint") {
    const auto omega = parse_double(take("omega"), "twopoint omega");
    done();
    return DiscreteDistribution::two_point(omega);
  }
  if (kind == "finite") {
    std::vector<double> masses;
    for (const auto m : split(take("p"), '|')) masses.push_back(parse_double(m, "finite p"));
    done();
    return DiscreteDistribution::finite(std::move(masses));
  }
  throw parse_error("unknown distribution kind '" + kind + "'");
}

inline void write_sample(std::ostream& out, const std::vector<SymbolId>& ids) {
  for (const auto id : ids) out << id << '\n';
}

}  // namespace mmass
