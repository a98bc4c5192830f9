// Part of the blowchoc project, under Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX short identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace blowchoc {

/// The golden ratio, default base of the exponential cost.
inline constexpr double kGoldenRatio = 1.6180339887498948482;

// Block-choice costs in terms of j (set bits after the insertion) and a
// (newly set bits). The quarter- and half-load anchors are block_bits / 4
// and block_bits / 2 (128 and 256 for 512-bit blocks).

/// beta^(j / (B/4)) + a / k
double cost_exp(std::size_t j, std::size_t a, unsigned k, double beta,
                std::size_t block_bits = 512);

/// sigma * k * (j / (B/2))^k + a
double cost_mix(std::size_t j, std::size_t a, unsigned k, double sigma,
                std::size_t block_bits = 512);

/// Mixed cost with sigma = 1 evaluated at j + mu*k: k * ((j + mu*k) / (B/2))^k + a
double cost_lookahead(std::size_t j, std::size_t a, unsigned k, double mu,
                      std::size_t block_bits = 512);

enum class CostKind : std::uint8_t { exp = 0, mix = 1, lookahead = 2 };

std::string_view to_string(CostKind kind);
/// Accepts "exp", "mix" and "la"/"lookahead"; throws std::invalid_argument.
CostKind parse_cost_kind(std::string_view name);

/// A cost function together with its parameter (beta, sigma or mu).
struct CostModel {
  CostKind kind = CostKind::exp;
  double param = kGoldenRatio;

  static CostModel exponential(double beta = kGoldenRatio) { return {CostKind::exp, beta}; }
  static CostModel mixed(double sigma) { return {CostKind::mix, sigma}; }
  static CostModel lookahead(double mu) { return {CostKind::lookahead, mu}; }
  /// Default parameter per kind: beta = golden ratio, sigma = 1, mu = 3.5.
  static double default_param(CostKind kind);

  /// EXP needs beta > 0; MIX and LA need a non-negative parameter.
  void validate() const;

  double operator()(std::size_t j, std::size_t a, unsigned k, std::size_t block_bits) const;

  friend bool operator==(const CostModel&, const CostModel&) = default;
};

/// Precomputed cost for fixed (k, B): cost(j, a) = load_term[j] + a / added_divisor.
/// Produces the same doubles as CostModel::operator().
class CostTable {
 public:
  CostTable() = default;
  CostTable(const CostModel& model, unsigned k, std::size_t block_bits);

  double operator()(std::size_t j, std::size_t a) const {
    return load_term_[j] + static_cast<double>(a) / added_divisor_;
  }

 private:
  std::vector<double> load_term_;
  double added_divisor_ = 1.0;
};

}  // namespace blowchoc
