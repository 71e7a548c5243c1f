#include "dppmle/cnf.hpp"

#include <algorithm>
#include <sstream>

#include "dppmle/errors.hpp"

namespace dppmle {

CnfFormula parse_dimacs(std::string_view text) {
  CnfFormula formula;
  int declared_vars = -1;
  int declared_clauses = -1;
  std::vector<int> pending;  // literals of the clause being read

  std::istringstream in{std::string(text)};
  std::string token;
  bool in_comment = false;
  int max_var_seen = 0;

  auto flush_clause = [&]() {
    const int index = formula.clause_count();
    if (pending.size() != 3) {
      throw ValidationError("clause " + std::to_string(index) + " has " +
                            std::to_string(pending.size()) +
                            " literals; exactly 3 required");
    }
    std::array<Literal, 3> clause;
    for (int p = 0; p < 3; ++p) {
      clause[p] = Literal{std::abs(pending[p]) - 1, pending[p] < 0};
    }
    for (int a = 0; a < 3; ++a) {
      for (int b = a + 1; b < 3; ++b) {
        if (clause[a].var == clause[b].var) {
          throw ValidationError("clause " + std::to_string(index) +
                                " repeats variable " +
                                std::to_string(clause[a].var + 1));
        }
      }
    }
    formula.clauses.push_back(clause);
    pending.clear();
  };

  while (in >> token) {
    if (in_comment) {
      // skip to end of line
      if (token.find('\n') != std::string::npos) in_comment = false;
      continue;
    }
    if (token == "c") {
      std::string rest;
      std::getline(in, rest);
      continue;
    }
    if (token == "p") {
      std::string kind;
      if (!(in >> kind) || kind != "cnf" || !(in >> declared_vars) ||
          !(in >> declared_clauses)) {
        throw ParseError("malformed DIMACS header");
      }
      continue;
    }
    int lit = 0;
    try {
      std::size_t used = 0;
      lit = std::stoi(token, &used);
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw ParseError("bad literal token '" + token + "'");
    }
    if (lit == 0) {
      flush_clause();
    } else {
      max_var_seen = std::max(max_var_seen, std::abs(lit));
      pending.push_back(lit);
    }
  }
  if (!pending.empty()) flush_clause();  // tolerate a missing trailing 0

  formula.variable_count = std::max(declared_vars, max_var_seen);
  if (formula.variable_count <= 0) {
    throw ParseError("formula declares no variables");
  }
  if (declared_vars >= 0 && max_var_seen > declared_vars) {
    throw ParseError("literal references variable " +
                     std::to_string(max_var_seen) + " beyond declared " +
                     std::to_string(declared_vars));
  }
  if (declared_clauses >= 0 && formula.clause_count() != declared_clauses) {
    throw ParseError("header declares " + std::to_string(declared_clauses) +
                     " clauses but " + std::to_string(formula.clause_count()) +
                     " were read");
  }
  if (formula.clauses.empty()) {
    throw ParseError("formula has no clauses");
  }

  std::vector<int> occurrences(formula.variable_count, 0);
  for (const auto& clause : formula.clauses) {
    for (const auto& lit : clause) ++occurrences[lit.var];
  }
  formula.max_occurrences =
      *std::max_element(occurrences.begin(), occurrences.end());
  return formula;
}

std::string to_dimacs(const CnfFormula& formula) {
  std::ostringstream out;
  out << "p cnf " << formula.variable_count << ' ' << formula.clause_count()
      << '\n';
  for (const auto& clause : formula.clauses) {
    for (const auto& lit : clause) {
      out << (lit.negated ? -(lit.var + 1) : (lit.var + 1)) << ' ';
    }
    out << "0\n";
  }
  return out.str();
}

bool clause_satisfied(const std::array<Literal, 3>& clause,
                      const std::vector<bool>& assignment) {
  for (const auto& lit : clause) {
    if (assignment.at(lit.var) != lit.negated) return true;
  }
  return false;
}

double satisfied_fraction(const CnfFormula& formula,
                          const std::vector<bool>& assignment) {
  int satisfied = 0;
  for (const auto& clause : formula.clauses) {
    if (clause_satisfied(clause, assignment)) ++satisfied;
  }
  return static_cast<double>(satisfied) /
         static_cast<double>(formula.clause_count());
}

namespace {

// -1 unassigned, 0 false, 1 true
bool dpll(const CnfFormula& formula, std::vector<int>& values) {
  // Unit propagation over 3-clauses.
  bool changed = true;
  std::vector<std::pair<int, int>> trail;  // (var, previous value)
  auto assign = [&](int var, int value) {
    trail.emplace_back(var, values[var]);
    values[var] = value;
  };
  while (changed) {
    changed = false;
    for (const auto& clause : formula.clauses) {
      int unassigned = -1;
      int satisfied = 0;
      int free_count = 0;
      for (const auto& lit : clause) {
        const int v = values[lit.var];
        if (v == -1) {
          unassigned = lit.negated ? -(lit.var + 1) : (lit.var + 1);
          ++free_count;
        } else if ((v == 1) != lit.negated) {
          satisfied = 1;
        }
      }
      if (satisfied) continue;
      if (free_count == 0) {
        for (auto it = trail.rbegin(); it != trail.rend(); ++it) {
          values[it->first] = it->second;
        }
        return false;
      }
      if (free_count == 1) {
        assign(std::abs(unassigned) - 1, unassigned > 0 ? 1 : 0);
        changed = true;
      }
    }
  }

  int branch = -1;
  for (int v = 0; v < formula.variable_count; ++v) {
    if (values[v] == -1) {
      branch = v;
      break;
    }
  }
  if (branch == -1) return true;

  for (int value : {1, 0}) {
    std::vector<std::pair<int, int>> mark;
    mark.emplace_back(branch, values[branch]);
    values[branch] = value;
    if (dpll(formula, values)) return true;
    values[branch] = mark[0].second;
  }
  for (auto it = trail.rbegin(); it != trail.rend(); ++it) {
    values[it->first] = it->second;
  }
  return false;
}

}  // namespace

std::optional<std::vector<bool>> solve_sat(const CnfFormula& formula,
                                           int variable_guard) {
  if (formula.variable_count > variable_guard) {
    throw SizeGuardError("satisfiability check guarded at " +
                         std::to_string(variable_guard) + " variables, got " +
                         std::to_string(formula.variable_count));
  }
  std::vector<int> values(formula.variable_count, -1);
  if (!dpll(formula, values)) return std::nullopt;
  std::vector<bool> assignment(formula.variable_count);
  for (int v = 0; v < formula.variable_count; ++v) {
    assignment[v] = values[v] == 1;  // unassigned-after-propagation is false
  }
  return assignment;
}

}  // namespace dppmle
