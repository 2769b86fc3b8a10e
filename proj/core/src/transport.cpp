/*
 * SPDX-License-Identifier: Apache-2.0
 */
#include "covprop/transport.hpp"

#include <algorithm>
#include <optional>

#include "covprop/errors.hpp"

namespace covprop {

namespace {

// Basis tree of the transportation tableau: nodes 0..m-1 are rows,
// m..m+n-1 are columns, and each basic cell (i, j) is an edge.
struct Cell {
  std::size_t i;
  std::size_t j;
};

// Path of cells from column node `col` back to row node `row` through the
// basis tree, found by breadth-first search. Returned in order starting at
// the cell touching column `col`.
std::vector<std::size_t> tree_path(const std::vector<Cell>& basis, std::size_t m, std::size_t n, std::size_t row,
                                   std::size_t col) {
  const std::size_t nodes = m + n;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(nodes);  // (neighbor, basis index)
  for (std::size_t b = 0; b < basis.size(); ++b) {
    adj[basis[b].i].emplace_back(m + basis[b].j, b);
    adj[m + basis[b].j].emplace_back(basis[b].i, b);
  }
  const std::size_t start = m + col;
  std::vector<std::optional<std::pair<std::size_t, std::size_t>>> parent(nodes);  // (prev node, edge)
  std::vector<bool> seen(nodes, false);
  std::vector<std::size_t> queue{start};
  seen[start] = true;
  for (std::size_t q = 0; q < queue.size(); ++q) {
    const std::size_t u = queue[q];
    if (u == row) break;
    for (auto [v, e] : adj[u]) {
      if (seen[v]) continue;
      seen[v] = true;
      parent[v] = std::pair{u, e};
      queue.push_back(v);
    }
  }
  std::vector<std::size_t> path;
  for (std::size_t u = row; u != start;) {
    const auto [prev, edge] = *parent[u];
    path.push_back(edge);
    u = prev;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

TransportPlan solve_transport(const std::vector<Rational>& supply, const std::vector<Rational>& demand,
                              const RationalMatrix& cost) {
  const std::size_t m = supply.size();
  const std::size_t n = demand.size();
  if (m == 0 || n == 0 || cost.rows() != m || cost.cols() != n) {
    throw DomainError("DimensionMismatch", "cost matrix does not match supply/demand sizes");
  }
  Rational total_s = 0;
  Rational total_d = 0;
  for (const auto& s : supply) {
    if (s < 0) throw DomainError("UnbalancedTransport", "negative supply");
    total_s += s;
  }
  for (const auto& d : demand) {
    if (d < 0) throw DomainError("UnbalancedTransport", "negative demand");
    total_d += d;
  }
  if (total_s != total_d) throw DomainError("UnbalancedTransport", "supply and demand totals differ");

  TransportPlan plan;
  plan.flow = RationalMatrix(m, n);
  RationalMatrix& x = plan.flow;

  // Northwest corner: exactly m + n - 1 basic cells, some possibly at zero.
  std::vector<Cell> basis;
  {
    std::vector<Rational> s = supply;
    std::vector<Rational> d = demand;
    std::size_t i = 0;
    std::size_t j = 0;
    while (true) {
      const Rational q = std::min(s[i], d[j]);
      x(i, j) = q;
      s[i] -= q;
      d[j] -= q;
      basis.push_back({i, j});
      if (i == m - 1 && j == n - 1) break;
      if (i < m - 1 && (s[i] == 0 || j == n - 1)) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  std::vector<char> is_basic(m * n, 0);
  for (const auto& c : basis) is_basic[c.i * n + c.j] = 1;

  std::vector<Rational> u(m);
  std::vector<Rational> v(n);
  while (true) {
    // Potentials: u_i + v_j = c_ij on basic cells, u_0 = 0.
    std::vector<char> have_u(m, 0);
    std::vector<char> have_v(n, 0);
    u[0] = 0;
    have_u[0] = 1;
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& c : basis) {
        if (have_u[c.i] && !have_v[c.j]) {
          v[c.j] = cost(c.i, c.j) - u[c.i];
          have_v[c.j] = 1;
          changed = true;
        } else if (!have_u[c.i] && have_v[c.j]) {
          u[c.i] = cost(c.i, c.j) - v[c.j];
          have_u[c.i] = 1;
          changed = true;
        }
      }
    }

    // Bland: first non-basic cell with negative reduced cost enters.
    std::optional<Cell> entering;
    for (std::size_t i = 0; i < m && !entering; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (is_basic[i * n + j]) continue;
        if (cost(i, j) - u[i] - v[j] < 0) {
          entering = Cell{i, j};
          break;
        }
      }
    }
    if (!entering) break;

    // Cycle: entering cell (+), then alternating -, + along the tree path
    // from its column back to its row.
    const auto path = tree_path(basis, m, n, entering->i, entering->j);
    std::optional<std::size_t> leaving;
    Rational theta;
    for (std::size_t k = 0; k < path.size(); k += 2) {
      const Cell& c = basis[path[k]];
      const Rational& q = x(c.i, c.j);
      const std::size_t key = c.i * n + c.j;
      if (!leaving || q < theta ||
          (q == theta && key < basis[*leaving].i * n + basis[*leaving].j)) {
        leaving = path[k];
        theta = q;
      }
    }
    x(entering->i, entering->j) = theta;
    for (std::size_t k = 0; k < path.size(); ++k) {
      const Cell& c = basis[path[k]];
      if (k % 2 == 0) {
        x(c.i, c.j) -= theta;
      } else {
        x(c.i, c.j) += theta;
      }
    }
    const Cell out = basis[*leaving];
    is_basic[out.i * n + out.j] = 0;
    is_basic[entering->i * n + entering->j] = 1;
    basis[*leaving] = *entering;
    ++plan.pivots;
  }

  plan.cost = 0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) plan.cost += cost(i, j) * x(i, j);
  return plan;
}

std::size_t LinearProgram::add_variable(const Rational& cost) {
  cost_.push_back(cost);
  return cost_.size() - 1;
}

void LinearProgram::add_equality(std::vector<std::pair<std::size_t, Rational>> terms, const Rational& rhs) {
  rows_.push_back(std::move(terms));
  rhs_.push_back(rhs);
}

namespace {

// Dense tableau: rows 0..m-1 constraints, column `cols` holds the rhs.
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * (cols + 1), Rational(0)) {}

  Rational& at(std::size_t r, std::size_t c) { return a_[r * (cols_ + 1) + c]; }
  const Rational& at(std::size_t r, std::size_t c) const { return a_[r * (cols_ + 1) + c]; }
  Rational& rhs(std::size_t r) { return at(r, cols_); }

  void pivot(std::size_t pr, std::size_t pc, std::vector<Rational>& objective, Rational& objective_value) {
    const Rational p = at(pr, pc);
    for (std::size_t c = 0; c <= cols_; ++c) at(pr, c) /= p;
    for (std::size_t r = 0; r < rows_; ++r) {
      if (r == pr) continue;
      const Rational f = at(r, pc);
      if (f == 0) continue;
      for (std::size_t c = 0; c <= cols_; ++c) {
        if (at(pr, c) != 0) at(r, c) -= f * at(pr, c);
      }
    }
    const Rational f = objective[pc];
    if (f != 0) {
      for (std::size_t c = 0; c < cols_; ++c) {
        if (at(pr, c) != 0) objective[c] -= f * at(pr, c);
      }
      objective_value -= f * at(pr, cols_);
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Rational> a_;
};

// Reduced-cost simplex with Bland's rule over columns [0, allowed).
// `reduced` holds reduced costs; `value` tracks -objective (tableau convention).
// Returns false if unbounded.
bool run_simplex(Tableau& t, std::vector<std::size_t>& basis, std::vector<Rational>& reduced, Rational& value,
                 std::size_t allowed, std::uint64_t& pivots) {
  while (true) {
    std::optional<std::size_t> enter;
    for (std::size_t c = 0; c < allowed; ++c) {
      if (reduced[c] < 0) {
        enter = c;
        break;
      }
    }
    if (!enter) return true;
    std::optional<std::size_t> leave;
    Rational best;
    for (std::size_t r = 0; r < t.rows(); ++r) {
      const Rational& a = t.at(r, *enter);
      if (a <= 0) continue;
      Rational ratio = t.rhs(r) / a;
      if (!leave || ratio < best || (ratio == best && basis[r] < basis[*leave])) {
        leave = r;
        best = ratio;
      }
    }
    if (!leave) return false;
    t.pivot(*leave, *enter, reduced, value);
    basis[*leave] = *enter;
    ++pivots;
  }
}

}  // namespace

LinearProgram::Result LinearProgram::solve() const {
  const std::size_t m = rows_.size();
  const std::size_t n = cost_.size();
  Result result;

  // Columns: n structural, then m artificials.
  Tableau t(m, n + m);
  for (std::size_t r = 0; r < m; ++r) {
    const int flip = rhs_[r] < 0 ? -1 : 1;
    for (const auto& [var, coef] : rows_[r]) t.at(r, var) += flip * coef;
    t.rhs(r) = flip * rhs_[r];
    t.at(r, n + r) = 1;
  }
  std::vector<std::size_t> basis(m);
  for (std::size_t r = 0; r < m; ++r) basis[r] = n + r;

  // Phase 1: minimize the sum of artificials.
  std::vector<Rational> reduced(n + m, Rational(0));
  Rational value = 0;
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < n; ++c) reduced[c] -= t.at(r, c);
    value -= t.rhs(r);
  }
  run_simplex(t, basis, reduced, value, n + m, result.pivots);
  if (value != 0) {
    result.status = Status::Infeasible;
    return result;
  }
  // Drive remaining (zero-valued) artificials out of the basis where possible.
  std::vector<bool> redundant(m, false);
  for (std::size_t r = 0; r < m; ++r) {
    if (basis[r] < n) continue;
    std::optional<std::size_t> col;
    for (std::size_t c = 0; c < n && !col; ++c) {
      if (t.at(r, c) != 0) col = c;
    }
    if (col) {
      Rational dummy = 0;
      std::vector<Rational> scratch(n + m, Rational(0));
      t.pivot(r, *col, scratch, dummy);
      basis[r] = *col;
      ++result.pivots;
    } else {
      redundant[r] = true;
    }
  }

  // Phase 2 on structural columns; redundant rows stay at zero.
  reduced.assign(n + m, Rational(0));
  value = 0;
  for (std::size_t c = 0; c < n; ++c) reduced[c] = cost_[c];
  for (std::size_t r = 0; r < m; ++r) {
    if (redundant[r]) continue;
    const Rational cb = cost_[basis[r]];
    if (cb == 0) continue;
    for (std::size_t c = 0; c < n; ++c) reduced[c] -= cb * t.at(r, c);
    value -= cb * t.rhs(r);
  }
  if (!run_simplex(t, basis, reduced, value, n, result.pivots)) {
    result.status = Status::Unbounded;
    return result;
  }
  result.status = Status::Optimal;
  result.x.assign(n, Rational(0));
  for (std::size_t r = 0; r < m; ++r) {
    if (basis[r] < n) result.x[basis[r]] = t.rhs(r);
  }
  result.objective = 0;
  for (std::size_t c = 0; c < n; ++c) result.objective += cost_[c] * result.x[c];
  return result;
}

}  // namespace covprop
