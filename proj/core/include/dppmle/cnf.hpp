#ifndef DPPMLE_CNF_HPP
#define DPPMLE_CNF_HPP

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dppmle {

struct Literal {
  int var = 0;           // 0-based variable index
  bool negated = false;
};

/// 3-CNF formula with exactly three literals on distinct variables per
/// clause. max_occurrences is the largest number of clauses any single
/// variable appears in.
struct CnfFormula {
  int variable_count = 0;
  std::vector<std::array<Literal, 3>> clauses;
  int max_occurrences = 0;

  int clause_count() const { return static_cast<int>(clauses.size()); }
};

/// Parses DIMACS CNF. Rejects clauses whose size is not exactly three or
/// that repeat a variable.
CnfFormula parse_dimacs(std::string_view text);

std::string to_dimacs(const CnfFormula& formula);

bool clause_satisfied(const std::array<Literal, 3>& clause,
                      const std::vector<bool>& assignment);

/// Fraction of clauses the assignment satisfies.
double satisfied_fraction(const CnfFormula& formula,
                          const std::vector<bool>& assignment);

/// Exhaustive satisfiability check (DPLL with unit propagation).
/// Returns a satisfying assignment or nullopt. Guarded at 20 variables.
std::optional<std::vector<bool>> solve_sat(const CnfFormula& formula,
                                           int variable_guard = 20);

}  // namespace dppmle

#endif  // DPPMLE_CNF_HPP
