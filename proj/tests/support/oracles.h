#pragma once

// Independent reference implementations used by unit and acceptance tests.
// They deliberately avoid the library's helpers (no Matrix products, no
// business_neighbor) so agreement is evidence, not tautology.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <vector>

namespace ecpipe::oracle {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;  // row-major, rows of equal length

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline Mat zeros(std::size_t r, std::size_t c) { return Mat(r, Vec(c, 0.0)); }

// Row vector `v` times matrix `w` (|v| x cols).
inline Vec vecmat(const Vec& v, const Mat& w) {
  Vec out(w.empty() ? 0 : w[0].size(), 0.0);
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += v[i] * w[i][j];
  return out;
}

struct GnnWeights {
  Mat w_a, w_x, w_r, w_z, u_x, u_r, u_z;
  Vec b_x, b_r, b_z;
};

// One propagation step written node by node straight from the four update
// equations; `adj` is a dense 0/1 matrix.
inline Mat gnn_step(const Mat& z, const Mat& adj, const GnnWeights& p) {
  const std::size_t n = z.size(), d = z.empty() ? 0 : z[0].size();
  Mat out = zeros(n, d);
  for (std::size_t v = 0; v < n; ++v) {
    Vec agg(d, 0.0);
    for (std::size_t u = 0; u < n; ++u)
      if (adj[v][u] != 0.0)
        for (std::size_t j = 0; j < d; ++j) agg[j] += adj[v][u] * z[u][j];
    const Vec a = vecmat(agg, p.w_a);
    const Vec ax = vecmat(a, p.w_x), zx = vecmat(z[v], p.u_x);
    const Vec ar = vecmat(a, p.w_r), zr = vecmat(z[v], p.u_r);
    Vec x(d), r(d), rz(d);
    for (std::size_t j = 0; j < d; ++j) {
      x[j] = sigmoid(ax[j] + zx[j] + p.b_x[j]);
      r[j] = sigmoid(ar[j] + zr[j] + p.b_r[j]);
      rz[j] = r[j] * z[v][j];
    }
    const Vec az = vecmat(a, p.w_z), uz = vecmat(rz, p.u_z);
    for (std::size_t j = 0; j < d; ++j) {
      const double h = std::tanh(az[j] + uz[j] + p.b_z[j]);
      out[v][j] = h + z[v][j] * (1.0 - x[j]);
    }
  }
  return out;
}

struct MlpWeights {
  Mat w1, w2;
  Vec b1, b2;
  bool relu = false;
};

inline Vec mlp(const Vec& x, const MlpWeights& m) {
  Vec h = vecmat(x, m.w1);
  for (std::size_t j = 0; j < h.size(); ++j) {
    h[j] += m.b1[j];
    h[j] = m.relu ? std::max(0.0, h[j]) : std::tanh(h[j]);
  }
  Vec o = vecmat(h, m.w2);
  for (std::size_t j = 0; j < o.size(); ++j) o[j] += m.b2[j];
  return o;
}

inline Vec aggregate(const Mat& z, const MlpWeights& gate, const MlpWeights& value) {
  Vec sum;
  for (const auto& row : z) {
    const Vec g = mlp(row, gate), v = mlp(row, value);
    if (sum.empty()) sum.assign(g.size(), 0.0);
    for (std::size_t j = 0; j < g.size(); ++j) sum[j] += sigmoid(g[j]) * std::tanh(v[j]);
  }
  for (double& s : sum) s /= static_cast<double>(z.size());
  return sum;
}

inline std::array<double, 2> softmax2(double a, double b) {
  const double m = std::max(a, b);
  const double ea = std::exp(a - m), eb = std::exp(b - m);
  return {ea / (ea + eb), eb / (ea + eb)};
}

// Per-class precision/recall by brute force over the label alphabet.
struct Metrics {
  double accuracy = 0, macro_precision = 0, macro_recall = 0;
};

inline Metrics metrics(const std::vector<int>& pred, const std::vector<int>& truth) {
  std::set<int> classes(pred.begin(), pred.end());
  classes.insert(truth.begin(), truth.end());
  Metrics m;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) correct += pred[i] == truth[i];
  m.accuracy = static_cast<double>(correct) / static_cast<double>(pred.size());
  for (int c : classes) {
    std::size_t tp = 0, pc = 0, tc = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      tp += pred[i] == c && truth[i] == c;
      pc += pred[i] == c;
      tc += truth[i] == c;
    }
    m.macro_precision += pc ? static_cast<double>(tp) / static_cast<double>(pc) : 0.0;
    m.macro_recall += tc ? static_cast<double>(tp) / static_cast<double>(tc) : 0.0;
  }
  m.macro_precision /= static_cast<double>(classes.size());
  m.macro_recall /= static_cast<double>(classes.size());
  return m;
}

// Label definitions evaluated on parallel arrays of day numbers and closes.
// `days` strictly increasing; `d` any day number.
struct DaySeries {
  std::vector<long> days;
  std::vector<double> closes;
};

inline std::optional<std::size_t> prev_pos(const DaySeries& s, long d, long gap) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < s.days.size(); ++i)
    if (s.days[i] < d && d - s.days[i] <= gap) best = i;
  return best;
}

inline std::optional<std::size_t> next_pos(const DaySeries& s, long d, long gap) {
  for (std::size_t i = 0; i < s.days.size(); ++i)
    if (s.days[i] > d) return s.days[i] - d <= gap ? std::optional<std::size_t>(i) : std::nullopt;
  return std::nullopt;
}

// nullopt: missing data. Inner optional: undefined label.
inline std::optional<int> vbl(const DaySeries& s, long d, long gap = 7) {
  auto p = prev_pos(s, d, gap), n = next_pos(s, d, gap);
  if (!p || !n) return std::nullopt;
  return s.closes[*n] > s.closes[*p] ? 1 : 0;
}

inline std::optional<std::optional<int>> sbl(const DaySeries& s, long d, double tau,
                                             long gap = 7) {
  auto p = prev_pos(s, d, gap), n = next_pos(s, d, gap);
  if (!p || !n) return std::nullopt;
  const double before = s.closes[*p], after = s.closes[*n];
  if ((after - before) / before >= tau) return std::optional<int>(1);
  if ((before - after) / before >= tau) return std::optional<int>(0);
  return std::optional<int>();
}

// Stock rates on its next five trading days after d versus the index's rate
// on the same calendar days (the index must trade on them).
inline std::optional<std::optional<int>> ibl(const DaySeries& stock, const DaySeries& index,
                                             long d, int k, long gap = 7) {
  std::vector<std::size_t> after;
  for (std::size_t i = 0; i < stock.days.size() && after.size() < 5; ++i)
    if (stock.days[i] > d) after.push_back(i);
  if (after.size() < 5) return std::nullopt;
  long prev_day = d;
  int ones = 0;
  for (std::size_t i : after) {
    if (stock.days[i] - prev_day > gap) return std::nullopt;
    prev_day = stock.days[i];
    if (i == 0 || stock.days[i] - stock.days[i - 1] > gap) return std::nullopt;
    const double rs = (stock.closes[i] - stock.closes[i - 1]) / stock.closes[i - 1];
    auto at = std::find(index.days.begin(), index.days.end(), stock.days[i]);
    if (at == index.days.end() || at == index.days.begin()) return std::nullopt;
    const std::size_t j = static_cast<std::size_t>(at - index.days.begin());
    if (index.days[j] - index.days[j - 1] > gap) return std::nullopt;
    const double ri = (index.closes[j] - index.closes[j - 1]) / index.closes[j - 1];
    ones += rs > ri ? 1 : 0;
  }
  if (ones >= k) return std::optional<int>(1);
  if (5 - ones >= k) return std::optional<int>(0);
  return std::optional<int>();
}

}  // namespace ecpipe::oracle
