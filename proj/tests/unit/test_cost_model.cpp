#include <doctest.h>

#include <cmath>

#include "rslpa/cost_model.hpp"
#include "rslpa/error.hpp"

using namespace rslpa;

namespace {

// Closed forms evaluated independently: Q(t) through the gamma function and
// the upper bound as an explicit geometric sum.
double q_gamma(double p, int t) {
  return std::exp(std::lgamma(t + 1.0 - p) - std::lgamma(1.0 - p) - std::lgamma(t + 1.0));
}

double eta_hat(double V, int T, double p) {
  double sum = 0.0;
  for (int t = 1; t <= T; ++t) sum += q_gamma(p, t);
  return T * V - V * sum;
}

double upper(double V, int T, double p) {
  double sum = 0.0;
  for (int t = 1; t <= T; ++t) sum += std::pow(1.0 - p, t);
  return T * V - V * sum;
}

}  // namespace

TEST_CASE("worked example") {
  const CostPrediction c = predict_cost({50, 100, 10, 10, 3});
  CHECK(c.p_c == doctest::Approx(0.19).epsilon(1e-12));
  const auto q = survival_probabilities(c.p_c, 3);
  REQUIRE(q.size() == 3);
  CHECK(q[0] == doctest::Approx(0.81));
  CHECK(q[1] == doctest::Approx(0.73305));
  CHECK(q[2] == doctest::Approx(0.686625));
  CHECK(c.eta_expected == doctest::Approx(38.51625));
  CHECK(c.eta_lower == doctest::Approx(28.5));
  CHECK(c.eta_upper == doctest::Approx(upper(50, 3, 0.19)));
}

TEST_CASE("trivial anchors") {
  const CostPrediction none = predict_cost({50, 100, 0, 0, 3});
  CHECK(none.p_c == 0.0);
  CHECK(none.eta_expected == doctest::Approx(0.0));
  CHECK(none.eta_lower == 0.0);
  CHECK(none.eta_upper == doctest::Approx(0.0));

  const CostPrediction all = predict_cost({50, 100, 100, 0, 3});
  CHECK(all.p_c == 1.0);
  CHECK(all.eta_expected == doctest::Approx(150.0));
  CHECK(all.eta_lower == doctest::Approx(150.0));
  CHECK(all.eta_upper == doctest::Approx(150.0));
}

TEST_CASE("closed forms agree with an independent evaluation") {
  for (std::uint64_t md : {0, 1, 7, 50, 99}) {
    for (std::uint64_t ma : {0, 3, 40, 500}) {
      for (std::uint32_t T : {1u, 2u, 10u, 50u, 200u}) {
        const CostProfile profile{300, 100, md, ma, T};
        const CostPrediction c = predict_cost(profile);
        const double E = 100.0;
        const double p = md / E + (1 - md / E) * (ma / (E - md + ma));
        CHECK(c.p_c == doctest::Approx(p).epsilon(1e-12));
        CHECK(c.eta_expected == doctest::Approx(eta_hat(300, T, p)).epsilon(1e-9));
        CHECK(c.eta_upper == doctest::Approx(upper(300, T, p)).epsilon(1e-9));
        CHECK(c.eta_lower <= c.eta_expected + 1e-9);
        CHECK(c.eta_expected <= c.eta_upper + 1e-9);
        CHECK(c.p_c >= 0.0);
        CHECK(c.p_c <= 1.0);
      }
    }
  }
}

TEST_CASE("literal variant follows the published formula") {
  for (std::uint64_t md : {0, 5, 30}) {
    for (std::uint64_t ma : {0, 5, 30}) {
      const double E = 100.0;
      const double printed = md / E + (1.0 - md / E) * ((E - md) / (E - md + ma));
      CHECK(change_probability({10, 100, md, ma, 5}, PcFormula::kLiteral) ==
            doctest::Approx(printed).epsilon(1e-15));
    }
  }
  // The defect that motivates the corrected default.
  CHECK(change_probability({10, 100, 0, 0, 5}, PcFormula::kLiteral) == 1.0);
  CHECK(change_probability({10, 100, 0, 0, 5}, PcFormula::kCorrected) == 0.0);
  CHECK(change_probability({10, 100, 100, 0, 5}, PcFormula::kCorrected) == 1.0);
  CHECK(formula_note(PcFormula::kCorrected).find("keep probability") != std::string::npos);
  CHECK(formula_note(PcFormula::kLiteral).find("keep probability") != std::string::npos);
}

TEST_CASE("formula names and errors") {
  CHECK(parse_pc_formula("literal") == PcFormula::kLiteral);
  CHECK(parse_pc_formula("corrected") == PcFormula::kCorrected);
  CHECK(std::string(to_string(PcFormula::kLiteral)) == "literal");
  CHECK_THROWS_AS(parse_pc_formula("exact"), DomainError);
  CHECK_THROWS_AS(predict_cost({10, 5, 6, 0, 3}), DomainError);
  CHECK_THROWS_AS(predict_cost({10, 0, 0, 2, 3}), DomainError);
  CHECK_THROWS_AS(predict_cost({0, 5, 0, 0, 3}), DomainError);
}

TEST_CASE("upper bound limit for tiny p") {
  const CostPrediction c = predict_cost({1000, 1000000000, 1, 0, 200});
  CHECK(c.eta_upper >= 0.0);
  CHECK(c.eta_upper == doctest::Approx(upper(1000, 200, c.p_c)).epsilon(1e-6));
}
