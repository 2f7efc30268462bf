#pragma once

// Limit degree distributions on {0, 1, 2, ...}: dirac, finite table, poisson,
// and power law with minimum degree. These drive sequence realization, the
// Lemma-style expected-count formulas (through falling-factorial moments), and
// the two-sorted branching process (plain + size-biased sampling).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "hmg/errors.hpp"
#include "hmg/rng.hpp"

namespace hmg {

enum class DistKind { Dirac, Finite, Poisson, PowerLaw };

// Support of a distribution, possibly cofinite (all naturals minus a finite set).
struct SupportSet {
  bool cofinite = false;
  std::set<int> degrees;  // the support itself, or the excluded set if cofinite

  bool contains(int k) const {
    if (k < 0) return false;
    return cofinite ? degrees.count(k) == 0 : degrees.count(k) > 0;
  }
  bool operator==(const SupportSet& o) const = default;
};

class LimitDistribution {
 public:
  static LimitDistribution dirac(int k) {
    LimitDistribution d;
    d.kind_ = DistKind::Dirac;
    d.dirac_k_ = k;
    return d;
  }

  static LimitDistribution finite(const std::map<int, double>& probs) {
    LimitDistribution d;
    d.kind_ = DistKind::Finite;
    double total = 0.0;
    for (auto [k, p] : probs) {
      if (k < 0 || p < 0) throw ConfigError("finite distribution: bad entry");
      if (p > 0) d.table_[k] = p;
      total += p;
    }
    if (d.table_.empty()) throw ConfigError("finite distribution: empty support");
    if (std::abs(total - 1.0) > 1e-9)
      throw ConfigError("finite distribution: masses sum to " + std::to_string(total));
    // renormalize away the (tiny) input rounding so invariants hold exactly
    for (auto& [k, p] : d.table_) p /= total;
    d.build_finite_cache();
    return d;
  }

  static LimitDistribution poisson(double mean) {
    if (!(mean > 0)) throw ConfigError("poisson distribution: mean must be positive");
    LimitDistribution d;
    d.kind_ = DistKind::Poisson;
    d.poisson_mean_ = mean;
    return d;
  }

  static LimitDistribution power_law(double alpha, int min_degree) {
    if (!(alpha > 1.0)) throw ConfigError("power law: alpha must exceed 1");
    if (min_degree < 0) throw ConfigError("power law: negative min degree");
    LimitDistribution d;
    d.kind_ = DistKind::PowerLaw;
    d.alpha_ = alpha;
    d.min_degree_ = std::max(min_degree, 1);
    d.pl_norm_ = power_sum(-alpha, d.min_degree_);
    d.build_powerlaw_cache();
    return d;
  }

  DistKind kind() const { return kind_; }
  int dirac_degree() const { return dirac_k_; }
  double poisson_mean() const { return poisson_mean_; }
  double alpha() const { return alpha_; }
  int min_degree() const { return min_degree_; }
  const std::map<int, double>& table() const { return table_; }

  double mass(int k) const {
    if (k < 0) return 0.0;
    switch (kind_) {
      case DistKind::Dirac:
        return k == dirac_k_ ? 1.0 : 0.0;
      case DistKind::Finite: {
        auto it = table_.find(k);
        return it == table_.end() ? 0.0 : it->second;
      }
      case DistKind::Poisson: {
        // exp(-c) c^k / k! via logs to dodge overflow
        double logp = -poisson_mean_ + k * std::log(poisson_mean_) - std::lgamma(k + 1.0);
        return std::exp(logp);
      }
      case DistKind::PowerLaw:
        if (k < min_degree_) return 0.0;
        return std::pow(static_cast<double>(k), -alpha_) / pl_norm_;
    }
    return 0.0;
  }

  // E[d], exact per kind; throws NonSummableError if divergent.
  double mean() const { return falling_moment(1); }

  // E[(d)_k] = E[d (d-1) ... (d-k+1)]; (d)_0 = 1.
  double falling_moment(int k) const {
    if (k < 0) throw ConfigError("falling_moment: negative order");
    if (k == 0) return 1.0;
    switch (kind_) {
      case DistKind::Dirac:
        return falling(dirac_k_, k);
      case DistKind::Finite: {
        double s = 0.0;
        for (auto [x, p] : table_) s += falling(x, k) * p;
        return s;
      }
      case DistKind::Poisson: {
        // E[(X)_k] = c^k for Poisson(c), an exact identity.
        return std::pow(poisson_mean_, static_cast<double>(k));
      }
      case DistKind::PowerLaw: {
        if (static_cast<double>(k) >= alpha_ - 1.0)
          throw NonSummableError("power-law falling moment of order " + std::to_string(k) +
                                 " diverges for alpha=" + std::to_string(alpha_));
        // expand (x)_k into monomials and sum each power series
        std::vector<double> coef{1.0};  // coefficients of prod (x - i)
        for (int i = 0; i < k; ++i) {
          std::vector<double> next(coef.size() + 1, 0.0);
          for (std::size_t j = 0; j < coef.size(); ++j) {
            next[j + 1] += coef[j];
            next[j] -= coef[j] * i;
          }
          coef = next;
        }
        double s = 0.0;
        for (std::size_t j = 0; j < coef.size(); ++j)
          if (coef[j] != 0.0) s += coef[j] * power_sum(static_cast<double>(j) - alpha_, min_degree_);
        return s / pl_norm_;
      }
    }
    return 0.0;
  }

  // Size-biased law d*(x) = (x+1) d(x+1) / E[d], materialized.
  // dirac(k) -> dirac(k-1); poisson(c) -> poisson(c) (exact identities);
  // finite -> finite. A power law materializes to a truncated finite table
  // covering all but ~1e-13 of the mass (renormalized).
  LimitDistribution size_biased() const {
    switch (kind_) {
      case DistKind::Dirac:
        if (dirac_k_ == 0) throw NonSummableError("size-biased of dirac(0) undefined");
        return dirac(dirac_k_ - 1);
      case DistKind::Poisson:
        return poisson(poisson_mean_);
      case DistKind::Finite: {
        double m = mean();
        if (m <= 0) throw NonSummableError("size-biased law needs positive mean");
        std::map<int, double> out;
        for (auto [x, p] : table_)
          if (x >= 1) out[x - 1] = x * p / m;
        return finite(out);
      }
      case DistKind::PowerLaw: {
        double m = mean();
        std::map<int, double> out;
        double acc = 0.0;
        for (int x = min_degree_; acc < 1.0 - 1e-13 && x < 4'000'000; ++x) {
          double p = x * mass(x) / m;
          out[x - 1] = p;
          acc += p;
        }
        return finite(out);
      }
    }
    throw ConfigError("unreachable");
  }

  // Exact size-biased offspring mass without materializing (used by the
  // branching process so power laws keep their full support).
  double size_biased_mass(int x) const { return (x + 1) * mass(x + 1) / mean(); }

  bool in_support(int k) const {
    if (k < 0) return false;
    switch (kind_) {
      case DistKind::Dirac:
        return k == dirac_k_;
      case DistKind::Finite:
        return table_.count(k) > 0;
      case DistKind::Poisson:
        return true;
      case DistKind::PowerLaw:
        return k >= min_degree_;
    }
    return false;
  }

  bool finite_support() const {
    return kind_ == DistKind::Dirac || kind_ == DistKind::Finite;
  }

  int max_support_degree() const {  // -1 when the support is infinite
    switch (kind_) {
      case DistKind::Dirac:
        return dirac_k_;
      case DistKind::Finite:
        return table_.rbegin()->first;
      default:
        return -1;
    }
  }

  int min_support_degree() const {
    switch (kind_) {
      case DistKind::Dirac:
        return dirac_k_;
      case DistKind::Finite:
        return table_.begin()->first;
      case DistKind::Poisson:
        return 0;
      case DistKind::PowerLaw:
        return min_degree_;
    }
    return 0;
  }

  SupportSet support_set() const {
    SupportSet s;
    switch (kind_) {
      case DistKind::Dirac:
        s.degrees = {dirac_k_};
        break;
      case DistKind::Finite:
        for (auto [k, p] : table_) s.degrees.insert(k);
        break;
      case DistKind::Poisson:
        s.cofinite = true;
        break;
      case DistKind::PowerLaw:
        s.cofinite = true;
        for (int k = 0; k < min_degree_; ++k) s.degrees.insert(k);
        break;
    }
    return s;
  }

  // Restriction to {0..kmax}, renormalized (a finite distribution).
  LimitDistribution truncated(int kmax) const {
    std::map<int, double> out;
    double total = 0.0;
    for (int k = 0; k <= kmax; ++k) {
      double p = mass(k);
      if (p > 0) {
        out[k] = p;
        total += p;
      }
    }
    if (total <= 0) throw ConfigError("truncation removed all mass");
    for (auto& [k, p] : out) p /= total;
    return finite(out);
  }

  int sample(Rng& rng) const {
    switch (kind_) {
      case DistKind::Dirac:
        return dirac_k_;
      case DistKind::Poisson:
        return rng.poisson(poisson_mean_);
      case DistKind::Finite: {
        double u = rng.uniform01();
        auto it = std::upper_bound(finite_cdf_.begin(), finite_cdf_.end(), u);
        std::size_t idx = static_cast<std::size_t>(it - finite_cdf_.begin());
        if (idx >= finite_vals_.size()) idx = finite_vals_.size() - 1;
        return finite_vals_[idx];
      }
      case DistKind::PowerLaw: {
        double u = rng.uniform01();
        auto it = std::upper_bound(pl_cdf_.begin(), pl_cdf_.end(), u);
        if (it != pl_cdf_.end())
          return min_degree_ + static_cast<int>(it - pl_cdf_.begin());
        // far tail (< ~1e-9 of the mass): invert the tail sum numerically
        int lo = min_degree_ + static_cast<int>(pl_cdf_.size());
        int hi = lo * 2 + 16;
        while (tail_mass(hi) > 1.0 - u) hi *= 2;
        while (lo < hi) {
          int mid = lo + (hi - lo) / 2;
          // P(X >= mid+1) vs 1-u
          if (tail_mass(mid + 1) > 1.0 - u)
            lo = mid + 1;
          else
            hi = mid;
        }
        return lo;
      }
    }
    return 0;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    switch (kind_) {
      case DistKind::Dirac:
        j["kind"] = "dirac";
        j["degree"] = dirac_k_;
        break;
      case DistKind::Finite: {
        j["kind"] = "finite";
        nlohmann::json probs;
        for (auto [k, p] : table_) probs[std::to_string(k)] = p;
        j["probs"] = probs;
        break;
      }
      case DistKind::Poisson:
        j["kind"] = "poisson";
        j["mean"] = poisson_mean_;
        break;
      case DistKind::PowerLaw:
        j["kind"] = "powerlaw";
        j["alpha"] = alpha_;
        j["min_degree"] = min_degree_;
        break;
    }
    return j;
  }

  static LimitDistribution from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "dirac") return dirac(j.at("degree").get<int>());
    if (kind == "poisson") return poisson(j.at("mean").get<double>());
    if (kind == "powerlaw")
      return power_law(j.at("alpha").get<double>(), j.at("min_degree").get<int>());
    if (kind == "finite") {
      std::map<int, double> probs;
      for (auto& [key, val] : j.at("probs").items()) probs[std::stoi(key)] = val.get<double>();
      return finite(probs);
    }
    throw ConfigError("unknown distribution kind: " + kind);
  }

  static double falling(int x, int k) {
    double v = 1.0;
    for (int i = 0; i < k; ++i) v *= (x - i);
    return k > x ? 0.0 : v;
  }

 private:
  LimitDistribution() = default;

  void build_finite_cache() {
    finite_vals_.clear();
    finite_cdf_.clear();
    double acc = 0.0;
    for (auto [k, p] : table_) {
      acc += p;
      finite_vals_.push_back(k);
      finite_cdf_.push_back(acc);
    }
    finite_cdf_.back() = 1.0;
  }

  void build_powerlaw_cache() {
    pl_cdf_.clear();
    double acc = 0.0;
    for (int k = min_degree_; acc < 1.0 - 1e-9 && k < min_degree_ + 2'000'000; ++k) {
      acc += std::pow(static_cast<double>(k), -alpha_) / pl_norm_;
      pl_cdf_.push_back(acc);
    }
  }

  // P(X >= x) for the power law, via the same tail formula as power_sum.
  double tail_mass(int x) const { return power_sum(-alpha_, x) / pl_norm_; }

  // sum_{x >= from} x^c for c < -1, by partial summation plus an
  // Euler-Maclaurin tail (relative error ~1e-14 at the cutoff used).
  static double power_sum(double c, int from) {
    if (c >= -1.0) throw NonSummableError("power series with exponent >= -1 diverges");
    const int cutoff = std::max(from + 64, 100'000);
    double s = 0.0;
    for (int x = from; x < cutoff; ++x) s += std::pow(static_cast<double>(x), c);
    const double K = static_cast<double>(cutoff);
    s += std::pow(K, c + 1) / (-1.0 - c) + std::pow(K, c) / 2.0 - c * std::pow(K, c - 1) / 12.0;
    return s;
  }

  DistKind kind_ = DistKind::Dirac;
  int dirac_k_ = 0;
  std::map<int, double> table_;
  double poisson_mean_ = 0.0;
  double alpha_ = 0.0;
  int min_degree_ = 1;
  double pl_norm_ = 1.0;
  std::vector<int> finite_vals_;
  std::vector<double> finite_cdf_;
  std::vector<double> pl_cdf_;
};

}  // namespace hmg
