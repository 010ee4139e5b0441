#pragma once

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "mmass/errors.hpp"
#include "mmass/numerics.hpp"
#include "mmass/profile.hpp"
#include "mmass/rng.hpp"

namespace mmass {

// Tail parameters (alpha, L) with x^alpha * #{j : p_j > x} -> L as x -> 0.
struct TailIndex {
  double alpha;
  double L;
};

// Parameters of the block construction: b * 2^k atoms of mass c * 2^{-k/alpha}
// for k >= 0 (the law Q), mixed as (1 - omega) Q + omega * delta_extra.
struct Lemma2Params {
  double alpha;
  double target_L;
  std::uint64_t b;
  double c;
  double L_prime;  // limsup of x^alpha * Fbar_Q(x); L_prime >= target_L
  double omega;
};

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// sum_{j=a}^{b} j^{-t} for t > 1. Direct summation of the first terms, then
// Euler-Maclaurin with three Bernoulli corrections for the remainder; the
// neglected term is below 1e-16 relative once the cut-over point is >= 64.
inline double power_sum_range(double t, std::uint64_t a, std::uint64_t b) {
  if (a == 0) a = 1;
  if (b < a) return 0.0;
  constexpr std::uint64_t kDirect = 64;
  CompensatedSum acc;
  const std::uint64_t direct_end = (b - a < kDirect) ? b : a + kDirect - 1;
  for (std::uint64_t j = a; j <= direct_end; ++j) acc.add(std::pow(static_cast<double>(j), -t));
  if (direct_end == b) return acc.value();

  const double m = static_cast<double>(direct_end + 1);
  const double e = static_cast<double>(b);
  const auto f = [t](double x) { return std::pow(x, -t); };
  // derivatives f^{(1)}, f^{(3)}, f^{(5)}
  const auto d1 = [t](double x) { return -t * std::pow(x, -t - 1.0); };
  const auto d3 = [t](double x) { return -t * (t + 1) * (t + 2) * std::pow(x, -t - 3.0); };
  const auto d5 = [t](double x) {
    return -t * (t + 1) * (t + 2) * (t + 3) * (t + 4) * std::pow(x, -t - 5.0);
  };
  const double integral = (std::pow(m, 1.0 - t) - std::pow(e, 1.0 - t)) / (t - 1.0);
  double em = integral + 0.5 * (f(m) + f(e));
  em += (1.0 / 12.0) * (d1(e) - d1(m));
  em += (-1.0 / 720.0) * (d3(e) - d3(m));
  em += (1.0 / 30240.0) * (d5(e) - d5(m));
  acc.add(em);
  return acc.value();
}

struct FiniteLaw {
  std::vector<double> masses;
  std::vector<double> sorted_desc;
  std::string spec;
};

struct GeometricLaw {
  double q;  // p_j = (1 - q) q^j, j >= 0
};

struct ZipfLaw {
  double alpha;
  double s;  // exponent 1 / alpha
  std::uint64_t truncation;
  double norm;  // sum_{j <= J} j^{-s}
  double mass(std::uint64_t rank) const { return std::pow(static_cast<double>(rank), -s) / norm; }
};

struct Lemma2Law {
  Lemma2Params p;
  double rho;                  // 2^{1 - 1/alpha}: ratio between consecutive block masses
  std::uint64_t base;          // 1 when the extra atom (id 0) exists
  std::uint64_t dense_blocks;  // blocks [0, dense_blocks) get dense ids
  double block_mass(std::uint64_t k) const {
    return (1.0 - p.omega) * p.c * std::exp2(-static_cast<double>(k) / p.alpha);
  }
  double block_size(std::uint64_t k) const {
    return static_cast<double>(p.b) * std::exp2(static_cast<double>(k));
  }
};

// Rejection-inversion sampling of a Zipf law truncated at N with exponent s
// (Hormann and Derflinger); ranks are 1-based.
class ZipfRejectionInversion {
 public:
  ZipfRejectionInversion(std::uint64_t n, double s) : n_(n), s_(s) {
    h_integral_x1_ = h_integral(1.5) - 1.0;
    h_integral_n_ = h_integral(static_cast<double>(n_) + 0.5);
    shift_ = 2.0 - h_integral_inverse(h_integral(2.5) - h(2.0));
  }

  std::uint64_t operator()(Rng& rng) const {
    while (true) {
      const double u = h_integral_n_ + uniform01(rng) * (h_integral_x1_ - h_integral_n_);
      const double x = h_integral_inverse(u);
      double kd = std::floor(x + 0.5);
      kd = std::clamp(kd, 1.0, static_cast<double>(n_));
      const auto k = static_cast<std::uint64_t>(kd);
      if (kd - x <= shift_ || u >= h_integral(kd + 0.5) - h(kd)) return k;
    }
  }

 private:
  static double helper1(double x) { return std::abs(x) > 1e-8 ? std::log1p(x) / x : 1.0 - x * (0.5 - x / 3.0); }
  static double helper2(double x) { return std::abs(x) > 1e-8 ? std::expm1(x) / x : 1.0 + x * 0.5 * (1.0 + x / 3.0); }
  double h(double x) const { return std::exp(-s_ * std::log(x)); }
  double h_integral(double x) const {
    const double lx = std::log(x);
    return helper2((1.0 - s_) * lx) * lx;
  }
  double h_integral_inverse(double x) const {
    double t = x * (1.0 - s_);
    if (t < -1.0) t = -1.0;
    return std::exp(helper1(t) * x);
  }

  std::uint64_t n_;
  double s_;
  double h_integral_x1_ = 0.0;
  double h_integral_n_ = 0.0;
  double shift_ = 0.0;
};

}  // namespace detail

class DiscreteDistribution;

// Per-thread sampling state for a distribution; cheap to copy.
class Sampler {
 public:
  SymbolId operator()(Rng& rng) {
    return std::visit([&](auto& s) { return s(rng); }, impl_);
  }

 private:
  friend class DiscreteDistribution;

  struct FiniteSampler {
    std::discrete_distribution<SymbolId> dist;
    SymbolId operator()(Rng& rng) { return dist(rng); }
  };
  struct GeometricSampler {
    std::geometric_distribution<SymbolId> dist;
    SymbolId operator()(Rng& rng) { return dist(rng); }
  };
  struct ZipfSampler {
    detail::ZipfRejectionInversion inner;
    SymbolId operator()(Rng& rng) { return inner(rng) - 1; }
  };
  struct Lemma2Sampler {
    const detail::Lemma2Law* law;
    std::geometric_distribution<std::uint64_t> block;
    SymbolId operator()(Rng& rng) {
      const auto& L = *law;
      if (L.p.omega > 0.0 && uniform01(rng) < L.p.omega) return 0;
      const std::uint64_t k = std::min<std::uint64_t>(block(rng), 127);
      if (k < L.dense_blocks) {
        const std::uint64_t size = L.p.b << k;
        std::uniform_int_distribution<std::uint64_t> idx(0, size - 1);
        return L.base + L.p.b * ((std::uint64_t{1} << k) - 1) + idx(rng);
      }
      // Deep blocks hold more than 2^56 atoms; the index is drawn from 56
      // random bits and the block number is stored alongside it.
      return (std::uint64_t{1} << 63) | (k << 56) | (rng() >> 8);
    }
  };

  using Impl = std::variant<FiniteSampler, GeometricSampler, ZipfSampler, Lemma2Sampler>;
  explicit Sampler(Impl impl) : impl_(std::move(impl)) {}
  Impl impl_;
};

// A discrete population P with exact mass access. Atoms are addressed by
// 0-based ids; for infinite supports ids follow decreasing mass.
class DiscreteDistribution {
 public:
  enum class Kind { finite, geometric, zipf, lemma2 };

  static DiscreteDistribution finite(std::vector<double> masses, std::string spec = {}) {
    require(!masses.empty(), "finite distribution needs at least one atom");
    CompensatedSum total;
    for (const double m : masses) {
      require(m > 0.0 && std::isfinite(m), "atom masses must be strictly positive");
      total.add(m);
    }
    require(std::abs(total.value() - 1.0) <= 1e-12, "atom masses must sum to 1");
    detail::FiniteLaw law;
    law.sorted_desc = masses;
    std::sort(law.sorted_desc.begin(), law.sorted_desc.end(), std::greater<>());
    if (spec.empty()) {
      spec = "finite:p=";
      for (std::size_t i = 0; i < masses.size(); ++i)
        spec += (i ? "|" : "") + detail::format_double(masses[i]);
    }
    law.masses = std::move(masses);
    law.spec = std::move(spec);
    return DiscreteDistribution(std::move(law));
  }

  static DiscreteDistribution uniform(std::uint64_t k) {
    require(k >= 1, "uniform: k must be >= 1");
    return finite(std::vector<double>(k, 1.0 / static_cast<double>(k)), "uniform:k=" + std::to_string(k));
  }

  static DiscreteDistribution two_point(double omega) {
    require(omega > 0.0 && omega < 1.0, "twopoint: omega must lie in (0,1)");
    return finite({1.0 - omega, omega}, "twopoint:omega=" + detail::format_double(omega));
  }

  static DiscreteDistribution geometric(double q) {
    require(q > 0.0 && q < 1.0, "geometric: q must lie in (0,1)");
    return DiscreteDistribution(detail::GeometricLaw{q});
  }

  static constexpr std::uint64_t kDefaultZipfTruncation = 10'000'000;

  static DiscreteDistribution zipf(double alpha, std::uint64_t truncation = kDefaultZipfTruncation) {
    require(alpha > 0.0 && alpha < 1.0, "zipf: alpha must lie in (0,1)");
    require(truncation >= 1, "zipf: truncation must be >= 1");
    const double s = 1.0 / alpha;
    return DiscreteDistribution(detail::ZipfLaw{alpha, s, truncation, detail::power_sum_range(s, 1, truncation)});
  }

  static DiscreteDistribution lemma2(double alpha, double target_L) {
    require(alpha > 0.0 && alpha < 1.0, "lemma2: alpha must lie in (0,1)");
    require(target_L > 0.0 && std::isfinite(target_L), "lemma2: L must be positive");
    const double gap = std::exp2(1.0 / alpha) - 2.0;
    const double b_real = std::pow(target_L / std::pow(gap, alpha), 1.0 / (1.0 - alpha));
    double b_ceil = std::ceil(b_real);
    // b_real landing a rounding error above an integer still means that integer
    if (b_ceil - 1.0 >= 1.0 && b_real - (b_ceil - 1.0) <= 1e-12 * b_real) b_ceil -= 1.0;
    b_ceil = std::max(b_ceil, 1.0);
    require(b_ceil < 1e15, "lemma2: L too large for the block construction");

    Lemma2Params p{};
    p.alpha = alpha;
    p.target_L = target_L;
    p.b = static_cast<std::uint64_t>(b_ceil);
    p.c = gap / (b_ceil * std::exp2(1.0 / alpha));
    p.L_prime = std::pow(b_ceil, 1.0 - alpha) * std::pow(gap, alpha);
    double omega = 1.0 - std::pow(target_L / p.L_prime, 1.0 / alpha);
    if (omega < 1e-12) omega = 0.0;
    p.omega = omega;

    detail::Lemma2Law law{p, std::exp2(1.0 - 1.0 / alpha), omega > 0.0 ? 1u : 0u, 0};
    // dense ids must stay below 2^62
    std::uint64_t k = 0;
    while (k < 62 && static_cast<double>(law.base) + law.block_size(k + 1) < 0x1.0p62) ++k;
    law.dense_blocks = k;
    return DiscreteDistribution(std::move(law));
  }

  // Companion weight of the two-point pair: omega1 = omega2 ((1-eps)/(1+eps))^{1/r}.
  static double lecam_companion(double omega2, double epsilon, unsigned r) {
    require(omega2 > 0.0 && omega2 < 1.0, "omega2 must lie in (0,1)");
    require(epsilon > 0.0 && epsilon < 1.0, "epsilon must lie in (0,1)");
    require(r >= 1, "r must be >= 1");
    return omega2 * std::pow((1.0 - epsilon) / (1.0 + epsilon), 1.0 / static_cast<double>(r));
  }

  Kind kind() const { return static_cast<Kind>(law_.index()); }

  std::string describe() const {
    using detail::format_double;
    switch (kind()) {
      case Kind::finite: return std::get<detail::FiniteLaw>(law_).spec;
      case Kind::geometric: return "geometric:q=" + format_double(std::get<detail::GeometricLaw>(law_).q);
      case Kind::zipf: {
        const auto& z = std::get<detail::ZipfLaw>(law_);
        std::string s = "zipf:alpha=" + format_double(z.alpha);
        if (z.truncation != kDefaultZipfTruncation) s += ",J=" + std::to_string(z.truncation);
        return s;
      }
      case Kind::lemma2: {
        const auto& p = std::get<detail::Lemma2Law>(law_).p;
        return "lemma2:alpha=" + format_double(p.alpha) + ",L=" + format_double(p.target_L);
      }
    }
    return {};
  }

  std::optional<std::uint64_t> support_size() const {
    if (const auto* f = std::get_if<detail::FiniteLaw>(&law_)) return f->masses.size();
    if (const auto* z = std::get_if<detail::ZipfLaw>(&law_)) return z->truncation;
    return std::nullopt;
  }

  const std::vector<double>& finite_masses() const {
    const auto* f = std::get_if<detail::FiniteLaw>(&law_);
    require(f != nullptr, "finite_masses: distribution has infinite or implicit support");
    return f->masses;
  }

  const Lemma2Params& lemma2_params() const {
    const auto* l = std::get_if<detail::Lemma2Law>(&law_);
    require(l != nullptr, "lemma2_params: not a lemma2 distribution");
    return l->p;
  }

  std::optional<TailIndex> tail_index() const {
    if (const auto* z = std::get_if<detail::ZipfLaw>(&law_)) return TailIndex{z->alpha, std::pow(z->norm, -z->alpha)};
    if (const auto* l = std::get_if<detail::Lemma2Law>(&law_)) return TailIndex{l->p.alpha, l->p.target_L};
    return std::nullopt;
  }

  double mass(SymbolId id) const {
    switch (kind()) {
      case Kind::finite: {
        const auto& m = std::get<detail::FiniteLaw>(law_).masses;
        require(id < m.size(), "symbol id outside the support");
        return m[id];
      }
      case Kind::geometric: {
        const double q = std::get<detail::GeometricLaw>(law_).q;
        return (1.0 - q) * std::pow(q, static_cast<double>(id));
      }
      case Kind::zipf: {
        const auto& z = std::get<detail::ZipfLaw>(law_);
        require(id < z.truncation, "symbol id outside the support");
        return z.mass(id + 1);
      }
      case Kind::lemma2: {
        const auto& l = std::get<detail::Lemma2Law>(law_);
        if (l.base == 1 && id == 0) return l.p.omega;
        return l.block_mass(lemma2_block_of(l, id));
      }
    }
    return 0.0;
  }

  // Fbar(x) = #{j : p_j > x}.
  std::uint64_t tail_count(double x) const {
    require(x > 0.0 && x < 1.0, "tail_count: x must lie in (0,1)");
    switch (kind()) {
      case Kind::finite: {
        const auto& m = std::get<detail::FiniteLaw>(law_).masses;
        return static_cast<std::uint64_t>(std::count_if(m.begin(), m.end(), [x](double p) { return p > x; }));
      }
      case Kind::geometric: {
        const double q = std::get<detail::GeometricLaw>(law_).q;
        const auto atom = [q](std::uint64_t j) { return (1.0 - q) * std::pow(q, static_cast<double>(j)); };
        return count_exceedances(atom, std::log(x / (1.0 - q)) / std::log(q), x,
                                 std::numeric_limits<std::uint64_t>::max());
      }
      case Kind::zipf: {
        const auto& z = std::get<detail::ZipfLaw>(law_);
        // ranks j with j < (x H)^{-alpha}; index i = j - 1
        const auto atom = [&z](std::uint64_t i) { return z.mass(i + 1); };
        return count_exceedances(atom, std::pow(x * z.norm, -z.alpha) - 1.0, x, z.truncation);
      }
      case Kind::lemma2: {
        const auto& l = std::get<detail::Lemma2Law>(law_);
        const std::uint64_t extra = (l.base == 1 && l.p.omega > x) ? 1 : 0;
        return extra + lemma2_blocks_above(l, x, [&l](std::uint64_t k) { return l.block_mass(k); });
      }
    }
    return 0;
  }

  // Fbar_Q(x) for the unmixed block law Q of a lemma2 distribution.
  std::uint64_t tail_count_pre_mixture(double x) const {
    const auto* l = std::get_if<detail::Lemma2Law>(&law_);
    require(l != nullptr, "tail_count_pre_mixture: not a lemma2 distribution");
    require(x > 0.0 && x < 1.0, "tail_count: x must lie in (0,1)");
    return lemma2_blocks_above(*l, x, [l](std::uint64_t k) {
      return l->p.c * std::exp2(-static_cast<double>(k) / l->p.alpha);
    });
  }

  // sum_j p_j^r.
  double power_sum(unsigned r) const {
    require(r >= 1, "power_sum: r must be >= 1");
    const double rd = r;
    switch (kind()) {
      case Kind::finite: {
        CompensatedSum acc;
        for (const double p : std::get<detail::FiniteLaw>(law_).masses) acc.add(std::pow(p, rd));
        return acc.value();
      }
      case Kind::geometric: {
        const double q = std::get<detail::GeometricLaw>(law_).q;
        return std::pow(1.0 - q, rd) / (1.0 - std::pow(q, rd));
      }
      case Kind::zipf: {
        const auto& z = std::get<detail::ZipfLaw>(law_);
        if (r == 1) return 1.0;
        return detail::power_sum_range(rd * z.s, 1, z.truncation) / std::pow(z.norm, rd);
      }
      case Kind::lemma2: {
        const auto& l = std::get<detail::Lemma2Law>(law_);
        return lemma2_block_tail(l, 0, r) + (l.base ? std::pow(l.p.omega, rd) : 0.0);
      }
    }
    return 0.0;
  }

  // theta_r = sum of p_j^r over atoms whose ids are absent from `observed`
  // (sorted, distinct). Fully observed regions contribute exactly zero; no
  // subtraction from the total power sum is involved.
  double unseen_power_sum(std::span<const SymbolId> observed, unsigned r) const {
    require(r >= 1, "r must be >= 1");
    require(std::is_sorted(observed.begin(), observed.end()), "observed ids must be sorted");
    const double rd = r;
    switch (kind()) {
      case Kind::finite: {
        const auto& m = std::get<detail::FiniteLaw>(law_).masses;
        require(observed.empty() || observed.back() < m.size(), "symbol id outside the support");
        CompensatedSum acc;
        std::size_t pos = 0;
        for (SymbolId id = 0; id < m.size(); ++id) {
          while (pos < observed.size() && observed[pos] < id) ++pos;
          if (pos < observed.size() && observed[pos] == id) continue;
          acc.add(std::pow(m[id], rd));
        }
        return acc.value();
      }
      case Kind::geometric: {
        const double q = std::get<detail::GeometricLaw>(law_).q;
        const double qr = std::pow(q, rd);
        const double lead = std::pow(1.0 - q, rd) / (1.0 - qr);
        // atoms a..b inclusive; b = max means "to infinity"
        const auto run = [&](std::uint64_t a, std::uint64_t count, bool infinite) {
          const double head = lead * std::pow(qr, static_cast<double>(a));
          return infinite ? head : head * -std::expm1(static_cast<double>(count) * std::log(qr));
        };
        CompensatedSum acc;
        std::uint64_t next = 0;
        for (const SymbolId id : observed) {
          if (id > next) acc.add(run(next, id - next, false));
          next = std::max<std::uint64_t>(next, id + 1);
        }
        acc.add(run(next, 0, true));
        return acc.value();
      }
      case Kind::zipf: {
        const auto& z = std::get<detail::ZipfLaw>(law_);
        require(observed.empty() || observed.back() < z.truncation, "symbol id outside the support");
        const double t = rd * z.s;
        CompensatedSum acc;
        std::uint64_t next = 1;  // ranks
        for (const SymbolId id : observed) {
          const std::uint64_t rank = id + 1;
          if (rank > next) acc.add(detail::power_sum_range(t, next, rank - 1));
          next = std::max(next, rank + 1);
        }
        if (next <= z.truncation) acc.add(detail::power_sum_range(t, next, z.truncation));
        return acc.value() / std::pow(z.norm, rd);
      }
      case Kind::lemma2: {
        const auto& l = std::get<detail::Lemma2Law>(law_);
        bool extra_seen = false;
        std::vector<std::pair<std::uint64_t, std::uint64_t>> per_block;  // (block, seen atoms)
        for (const SymbolId id : observed) {
          if (l.base == 1 && id == 0) {
            extra_seen = true;
            continue;
          }
          const std::uint64_t k = lemma2_block_of(l, id);
          if (!per_block.empty() && per_block.back().first == k)
            ++per_block.back().second;
          else
            per_block.emplace_back(k, 1);
        }
        // ids increase with the block number, but deep-block ids are not
        // ordered by block
        std::sort(per_block.begin(), per_block.end());
        CompensatedSum acc;
        std::uint64_t next_block = 0;
        for (std::size_t i = 0; i < per_block.size();) {
          const std::uint64_t k = per_block[i].first;
          std::uint64_t seen = 0;
          for (; i < per_block.size() && per_block[i].first == k; ++i) seen += per_block[i].second;
          for (std::uint64_t j = next_block; j < k; ++j) acc.add(l.block_size(j) * std::pow(l.block_mass(j), rd));
          acc.add((l.block_size(k) - static_cast<double>(seen)) * std::pow(l.block_mass(k), rd));
          next_block = k + 1;
        }
        acc.add(lemma2_block_tail(l, next_block, r));
        if (l.base == 1 && !extra_seen) acc.add(std::pow(l.p.omega, rd));
        return acc.value();
      }
    }
    return 0.0;
  }

  // Walks atom classes in decreasing-mass order (the lemma2 extra atom comes
  // first). visit(mass, multiplicity, tail_mass_after, max_mass_after) returns
  // false to stop. tail_mass_after bounds the total mass not yet visited.
  template <class Visit>
  void visit_atoms(Visit&& visit) const {
    switch (kind()) {
      case Kind::finite: {
        const auto& s = std::get<detail::FiniteLaw>(law_).sorted_desc;
        double remaining = 1.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
          remaining = std::max(0.0, remaining - s[i]);
          const double next = i + 1 < s.size() ? s[i + 1] : 0.0;
          if (!visit(s[i], 1.0, i + 1 < s.size() ? remaining : 0.0, next)) return;
        }
        return;
      }
      case Kind::geometric: {
        const double q = std::get<detail::GeometricLaw>(law_).q;
        double qj = 1.0;  // q^j
        while (true) {
          const double p = (1.0 - q) * qj;
          if (p == 0.0) return;
          if (!visit(p, 1.0, qj * q, p * q)) return;
          qj *= q;
        }
      }
      case Kind::zipf: {
        const auto& z = std::get<detail::ZipfLaw>(law_);
        double remaining = 1.0;
        for (std::uint64_t j = 1; j <= z.truncation; ++j) {
          const double p = z.mass(j);
          remaining = std::max(0.0, remaining - p);
          const double integral_bound =
              std::pow(static_cast<double>(j), 1.0 - z.s) / ((z.s - 1.0) * z.norm);
          const bool last = j == z.truncation;
          if (!visit(p, 1.0, last ? 0.0 : std::min(remaining, integral_bound), last ? 0.0 : z.mass(j + 1)))
            return;
        }
        return;
      }
      case Kind::lemma2: {
        const auto& l = std::get<detail::Lemma2Law>(law_);
        if (l.base == 1 && !visit(l.p.omega, 1.0, 1.0 - l.p.omega, l.block_mass(0))) return;
        for (std::uint64_t k = 0;; ++k) {
          const double p = l.block_mass(k);
          if (p == 0.0) return;
          const double tail = (1.0 - l.p.omega) * std::pow(l.rho, static_cast<double>(k + 1));
          if (!visit(p, l.block_size(k), tail, l.block_mass(k + 1))) return;
        }
      }
    }
  }

  Sampler sampler() const {
    switch (kind()) {
      case Kind::finite: {
        const auto& m = std::get<detail::FiniteLaw>(law_).masses;
        return Sampler(Sampler::FiniteSampler{std::discrete_distribution<SymbolId>(m.begin(), m.end())});
      }
      case Kind::geometric:
        return Sampler(Sampler::GeometricSampler{
            std::geometric_distribution<SymbolId>(1.0 - std::get<detail::GeometricLaw>(law_).q)});
      case Kind::zipf: {
        const auto& z = std::get<detail::ZipfLaw>(law_);
        return Sampler(Sampler::ZipfSampler{detail::ZipfRejectionInversion(z.truncation, z.s)});
      }
      case Kind::lemma2: {
        const auto& l = std::get<detail::Lemma2Law>(law_);
        // block k has probability (1 - rho) rho^k
        return Sampler(Sampler::Lemma2Sampler{&l, std::geometric_distribution<std::uint64_t>(1.0 - l.rho)});
      }
    }
    throw std::logic_error("unreachable");
  }

  // n independent draws, deterministic in seed.
  std::vector<SymbolId> sample(std::uint64_t n, std::uint64_t seed) const {
    Rng rng(seed);
    auto s = sampler();
    std::vector<SymbolId> out(n);
    for (auto& v : out) v = s(rng);
    return out;
  }

 private:
  using Law = std::variant<detail::FiniteLaw, detail::GeometricLaw, detail::ZipfLaw, detail::Lemma2Law>;
  explicit DiscreteDistribution(Law law) : law_(std::move(law)) {}

  // Number of leading atoms (by decreasing mass) above x, starting from the
  // analytic estimate `guess` and corrected against exact atom masses.
  template <class Atom>
  static std::uint64_t count_exceedances(const Atom& atom, double guess, double x, std::uint64_t cap) {
    if (!(atom(0) > x)) return 0;
    double g = std::ceil(std::max(guess, 1.0));
    if (g >= static_cast<double>(cap)) g = static_cast<double>(cap);
    require(g < 0x1.0p62, "tail_count: count overflows 64 bits");
    auto k = static_cast<std::uint64_t>(g);
    while (k > 1 && !(atom(k - 1) > x)) --k;
    while (k < cap && atom(k) > x) ++k;
    return k;
  }

  // Number of atoms in blocks whose (mixed or unmixed) mass exceeds x:
  // b (2^K - 1) with K the count of such blocks.
  template <class BlockMass>
  static std::uint64_t lemma2_blocks_above(const detail::Lemma2Law& l, double x, const BlockMass& mass) {
    const double v = l.p.alpha * std::log2(mass(0) / x);
    std::uint64_t blocks = 0;
    if (v > 0.0) {
      require(v < 62.0, "tail_count: count overflows 64 bits");
      blocks = static_cast<std::uint64_t>(std::ceil(v));
      while (blocks > 0 && !(mass(blocks - 1) > x)) --blocks;
      while (mass(blocks) > x) ++blocks;
    }
    require(blocks < 62, "tail_count: count overflows 64 bits");
    return l.p.b * ((std::uint64_t{1} << blocks) - 1);
  }

  static std::uint64_t lemma2_block_of(const detail::Lemma2Law& l, SymbolId id) {
    if (id >> 63) return (id >> 56) & 0x7F;
    require(id >= l.base, "symbol id outside the support");
    const std::uint64_t q = (id - l.base) / l.p.b;
    const auto k = static_cast<std::uint64_t>(std::bit_width(q + 1) - 1);
    require(k < l.dense_blocks, "symbol id outside the support");
    return k;
  }

  // sum over blocks k >= from of b 2^k (block mass)^r, in closed form.
  static double lemma2_block_tail(const detail::Lemma2Law& l, std::uint64_t from, unsigned r) {
    const double rd = r;
    const double ratio = std::exp2(1.0 - rd / l.p.alpha);
    return l.block_size(from) * std::pow(l.block_mass(from), rd) / (1.0 - ratio);
  }

  Law law_;
};

}  // namespace mmass
