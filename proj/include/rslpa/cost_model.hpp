#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rslpa {

// How the "chosen edge switched to a new edge" term of p_c is written.
//   kCorrected: switch probability m_a / (E - m_d + m_a)
//   kLiteral:   (E - m_d) / (E - m_d + m_a), the keep probability, as it
//               appears in the published formula. It gives p_c = 1 for an
//               empty batch, so it is kept for comparison only.
enum class PcFormula { kCorrected, kLiteral };

const char* to_string(PcFormula formula);
PcFormula parse_pc_formula(const std::string& name);

struct CostProfile {
  std::uint64_t vertices = 0;
  std::uint64_t edges = 0;
  std::uint64_t deleted = 0;
  std::uint64_t inserted = 0;
  std::uint32_t iterations = 0;
};

struct CostPrediction {
  double p_c = 0.0;
  double eta_expected = 0.0;
  double eta_lower = 0.0;
  double eta_upper = 0.0;
  PcFormula formula = PcFormula::kCorrected;
};

double change_probability(const CostProfile& profile, PcFormula formula);

// Q(t) = prod_{k=1..t} (1 - p_c / k) for t = 1..iterations.
std::vector<double> survival_probabilities(double p_c, std::uint32_t iterations);

// Expected number of label slots an update touches under uniformly drawn
// edits, with best-case (every label copied from an initial label) and
// worst-case (every label copied from the previous iteration) bounds.
CostPrediction predict_cost(const CostProfile& profile, PcFormula formula = PcFormula::kCorrected);

// Human-readable note on the two p_c variants, printed with predictions.
std::string formula_note(PcFormula formula);

}  // namespace rslpa
