#pragma once

#include <map>
#include <string>
#include <vector>

namespace emden::acceptance {

enum class Cmp { Less, LessEq, GreaterEq, Equal };

struct Tolerance {
  double value = 0.0;
  Cmp cmp = Cmp::Less;
};

using Tolerances = std::map<std::string, Tolerance>;

/// Every threshold the suite compares against, keyed "c<id>.<name>".
[[nodiscard]] Tolerances default_tolerances();

/// Moves one threshold to a value no measurement can satisfy. Throws std::invalid_argument for an
/// unknown key.
[[nodiscard]] Tolerances perturbed(Tolerances tol, const std::string& key);

struct Check {
  std::string key;
  double value = 0.0;
  Cmp cmp = Cmp::Less;
  double threshold = 0.0;

  [[nodiscard]] bool passed() const;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  std::vector<Check> checks;
  std::string error;
  double seconds = 0.0;

  [[nodiscard]] bool passed() const;
};

[[nodiscard]] const std::vector<int>& criterion_ids();
[[nodiscard]] std::string criterion_title(int id);

[[nodiscard]] CriterionResult run_criterion(int id, const Tolerances& tol = default_tolerances());
[[nodiscard]] std::vector<CriterionResult> run_suite(const std::vector<int>& ids,
                                                     const Tolerances& tol = default_tolerances());

/// One line: "PASS c3 <title>: key=value (< threshold) ...".
[[nodiscard]] std::string format_result(const CriterionResult& result);

[[nodiscard]] std::string to_string(Cmp cmp);

}  // namespace emden::acceptance
