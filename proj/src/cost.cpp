// Part of the blowchoc project, under Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX short identifier: Apache-2.0

#include "blowchoc/cost.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>
#include <string>

namespace blowchoc {

namespace {

double exp_load_term(std::size_t j, double beta, std::size_t block_bits) {
  return std::pow(beta, static_cast<double>(j) / (static_cast<double>(block_bits) / 4.0));
}

double mix_load_term(double j, unsigned k, double sigma, std::size_t block_bits) {
  const double ratio = j / (static_cast<double>(block_bits) / 2.0);
  return sigma * k * std::pow(ratio, static_cast<double>(k));
}

}  // namespace

double cost_exp(std::size_t j, std::size_t a, unsigned k, double beta, std::size_t block_bits) {
  return exp_load_term(j, beta, block_bits) + static_cast<double>(a) / k;
}

double cost_mix(std::size_t j, std::size_t a, unsigned k, double sigma, std::size_t block_bits) {
  return mix_load_term(static_cast<double>(j), k, sigma, block_bits) + static_cast<double>(a);
}

double cost_lookahead(std::size_t j, std::size_t a, unsigned k, double mu,
                      std::size_t block_bits) {
  return mix_load_term(static_cast<double>(j) + mu * k, k, 1.0, block_bits) +
         static_cast<double>(a);
}

std::string_view to_string(CostKind kind) {
  switch (kind) {
    case CostKind::exp:
      return "exp";
    case CostKind::mix:
      return "mix";
    case CostKind::lookahead:
      return "la";
  }
  return "?";
}

CostKind parse_cost_kind(std::string_view name) {
  if (name == "exp") return CostKind::exp;
  if (name == "mix") return CostKind::mix;
  if (name == "la" || name == "lookahead") return CostKind::lookahead;
  throw std::invalid_argument("unknown cost function '" + std::string(name) + "'");
}

double CostModel::default_param(CostKind kind) {
  switch (kind) {
    case CostKind::exp:
      return kGoldenRatio;
    case CostKind::mix:
      return 1.0;
    case CostKind::lookahead:
      return 3.5;
  }
  return kGoldenRatio;
}

void CostModel::validate() const {
  if (!std::isfinite(param)) throw std::invalid_argument("cost parameter must be finite");
  switch (kind) {
    case CostKind::exp:
      if (param <= 0.0) throw std::invalid_argument("exponential cost needs beta > 0");
      break;
    case CostKind::mix:
      if (param < 0.0) throw std::invalid_argument("mixed cost needs sigma >= 0");
      break;
    case CostKind::lookahead:
      if (param < 0.0) throw std::invalid_argument("lookahead cost needs mu >= 0");
      break;
    default:
      throw std::invalid_argument("unknown cost kind");
  }
}

double CostModel::operator()(std::size_t j, std::size_t a, unsigned k,
                             std::size_t block_bits) const {
  switch (kind) {
    case CostKind::exp:
      return cost_exp(j, a, k, param, block_bits);
    case CostKind::mix:
      return cost_mix(j, a, k, param, block_bits);
    case CostKind::lookahead:
      return cost_lookahead(j, a, k, param, block_bits);
  }
  return 0.0;
}

CostTable::CostTable(const CostModel& model, unsigned k, std::size_t block_bits)
    : load_term_(block_bits + 1) {
  assert(k >= 1);
  for (std::size_t j = 0; j <= block_bits; ++j) {
    switch (model.kind) {
      case CostKind::exp:
        load_term_[j] = exp_load_term(j, model.param, block_bits);
        break;
      case CostKind::mix:
        load_term_[j] = mix_load_term(static_cast<double>(j), k, model.param, block_bits);
        break;
      case CostKind::lookahead:
        load_term_[j] =
            mix_load_term(static_cast<double>(j) + model.param * k, k, 1.0, block_bits);
        break;
    }
  }
  added_divisor_ = model.kind == CostKind::exp ? static_cast<double>(k) : 1.0;
}

}  // namespace blowchoc
