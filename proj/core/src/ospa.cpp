#include "glmb/ospa.hpp"

#include <cmath>
#include <limits>

#include "glmb/error.hpp"

namespace glmb {

std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost) {
  if (cost.rows() != cost.cols()) throw invalid_argument("cost matrix is not square");
  const int n = static_cast<int>(cost.rows());
  if (n == 0) return {};
  const double inf = std::numeric_limits<double>::infinity();

  // Potentials u, v and column matches p; 1-indexed with column 0 as the
  // staging slot for the row currently being inserted.
  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<int> p(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> way(static_cast<std::size_t>(n) + 1, 0);

  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n) + 1, inf);
    std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      double delta = inf;
      int j1 = -1;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] -
                           v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j)
    row_to_col[static_cast<std::size_t>(p[static_cast<std::size_t>(j)]) - 1] = j - 1;
  return row_to_col;
}

OspaResult ospa(const std::vector<Eigen::VectorXd>& a,
                const std::vector<Eigen::VectorXd>& b, const OspaParams& params) {
  if (!(params.cutoff > 0.0)) throw invalid_argument("cutoff must be positive");
  if (!(params.order >= 1.0)) throw invalid_argument("order must be >= 1");
  for (const auto& x : a)
    for (const auto& y : b)
      if (x.size() != y.size())
        throw invalid_argument("point dimensions do not match");

  const int m = static_cast<int>(a.size());
  const int n = static_cast<int>(b.size());
  OspaResult out;
  if (m == 0 && n == 0) return out;

  const double c = params.cutoff;
  const double p = params.order;
  const double cp = std::pow(c, p);
  const int big = std::max(m, n);
  const int matched = std::min(m, n);

  double matched_cost = 0.0;
  if (matched > 0) {
    // Pad to square with the cutoff penalty; dummies cost the same wherever
    // they land, so real pairs are matched optimally.
    Eigen::MatrixXd cost = Eigen::MatrixXd::Constant(big, big, cp);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j)
        cost(i, j) = std::pow(std::min((a[static_cast<std::size_t>(i)] -
                                        b[static_cast<std::size_t>(j)]).norm(), c), p);
    const std::vector<int> match = min_cost_assignment(cost);
    for (int i = 0; i < m; ++i)
      if (match[static_cast<std::size_t>(i)] < n)
        matched_cost += cost(i, match[static_cast<std::size_t>(i)]);
  }

  const double card_cost = cp * static_cast<double>(std::abs(m - n));
  out.total = std::pow((matched_cost + card_cost) / big, 1.0 / p);
  out.localization = matched > 0 ? std::pow(matched_cost / matched, 1.0 / p) : 0.0;
  out.cardinality = std::pow(card_cost / big, 1.0 / p);
  return out;
}

}  // namespace glmb
