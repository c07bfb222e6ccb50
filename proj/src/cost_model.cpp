#include "rslpa/cost_model.hpp"

#include <cmath>

#include "rslpa/error.hpp"

namespace rslpa {

const char* to_string(PcFormula formula) {
  return formula == PcFormula::kCorrected ? "corrected" : "literal";
}

PcFormula parse_pc_formula(const std::string& name) {
  if (name == "corrected") return PcFormula::kCorrected;
  if (name == "literal") return PcFormula::kLiteral;
  throw DomainError("unknown p_c formula '" + name + "' (expected corrected or literal)");
}

double change_probability(const CostProfile& p, PcFormula formula) {
  if (p.deleted > p.edges) throw DomainError("more deletions than edges");
  if (p.edges == 0) {
    if (p.deleted + p.inserted > 0) throw DomainError("edits on a graph without edges");
    return formula == PcFormula::kCorrected ? 0.0 : 1.0;
  }
  const double E = static_cast<double>(p.edges);
  const double md = static_cast<double>(p.deleted);
  const double ma = static_cast<double>(p.inserted);
  const double remaining = E - md + ma;
  double switched = 0.0;
  if (remaining > 0.0) {
    switched = formula == PcFormula::kCorrected ? ma / remaining : (E - md) / remaining;
  }
  return md / E + (1.0 - md / E) * switched;
}

std::vector<double> survival_probabilities(double p_c, std::uint32_t iterations) {
  std::vector<double> q;
  q.reserve(iterations);
  double value = 1.0;
  for (std::uint32_t k = 1; k <= iterations; ++k) {
    value *= 1.0 - p_c / static_cast<double>(k);
    q.push_back(value);
  }
  return q;
}

CostPrediction predict_cost(const CostProfile& profile, PcFormula formula) {
  if (profile.vertices == 0) throw DomainError("need at least one vertex");
  if (profile.iterations == 0) throw DomainError("need at least one iteration");
  CostPrediction out;
  out.formula = formula;
  out.p_c = change_probability(profile, formula);

  const double V = static_cast<double>(profile.vertices);
  const double T = static_cast<double>(profile.iterations);
  double q_sum = 0.0;
  for (double q : survival_probabilities(out.p_c, profile.iterations)) q_sum += q;
  out.eta_expected = T * V - V * q_sum;
  out.eta_lower = T * V * out.p_c;

  // sum_{t=1..T} (1-p)^t; equals (1 - p - (1-p)^{T+1}) / p and tends to T
  // as p -> 0.
  const double p = out.p_c;
  double geometric = T;
  if (p >= 1.0) {
    geometric = 0.0;
  } else if (p > 0.0) {
    geometric = (-p - std::expm1((T + 1.0) * std::log1p(-p))) / p;
  }
  out.eta_upper = T * V - V * geometric;
  return out;
}

std::string formula_note(PcFormula formula) {
  if (formula == PcFormula::kCorrected) {
    return "p_c uses the switch probability m_a/(E-m_d+m_a) for a kept edge; the published "
           "formula prints the keep probability (E-m_d)/(E-m_d+m_a), which yields p_c=1 for an "
           "empty batch (use --pc-formula literal to reproduce it)";
  }
  return "p_c reproduces the published formula m_d/E+(1-m_d/E)*((E-m_d)/(E-m_d+m_a)); its second "
         "factor is the keep probability, so an empty batch gives p_c=1 and the bounds are not "
         "meaningful";
}

}  // namespace rslpa
