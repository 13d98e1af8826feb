#include "ecpipe/econometrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <Eigen/Dense>

#include "ecpipe/error.h"

namespace ecpipe {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd to_eigen(const Matrix& m) {
  MatrixXd out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  return out;
}

// Columns that do not raise the rank of the columns before them.
std::vector<std::size_t> dependent_columns(const Matrix& x) {
  const MatrixXd full = to_eigen(x);
  std::vector<std::size_t> bad;
  std::vector<Eigen::Index> kept;
  for (Eigen::Index j = 0; j < full.cols(); ++j) {
    MatrixXd trial(full.rows(), static_cast<Eigen::Index>(kept.size()) + 1);
    for (std::size_t k = 0; k < kept.size(); ++k) trial.col(k) = full.col(kept[k]);
    trial.col(trial.cols() - 1) = full.col(j);
    Eigen::ColPivHouseholderQR<MatrixXd> qr(trial);
    qr.setThreshold(1e-10);
    if (qr.rank() == trial.cols()) {
      kept.push_back(j);
    } else {
      bad.push_back(static_cast<std::size_t>(j));
    }
  }
  return bad;
}

}  // namespace

Design build_design(std::span<const RegressionRow> rows, const ModelSpec& spec,
                    const std::vector<std::size_t>* only_rows) {
  Design d;
  d.report.total = rows.size();
  std::set<std::size_t> allowed;
  if (only_rows) allowed.insert(only_rows->begin(), only_rows->end());

  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    std::string reason;
    if (only_rows && !allowed.contains(i)) reason = "outside common sample";
    if (reason.empty()) {
      auto it = r.labels.find(spec.dependent);
      if (it == r.labels.end() || !it->second) reason = "missing " + spec.dependent;
    }
    for (const auto& name : spec.continuous) {
      if (!reason.empty()) break;
      auto it = r.continuous.find(name);
      if (it == r.continuous.end() || !it->second || !std::isfinite(*it->second))
        reason = "missing " + name;
    }
    for (const auto& name : spec.categorical) {
      if (!reason.empty()) break;
      auto it = r.categorical.find(name);
      if (it == r.categorical.end() || !it->second) reason = "missing " + name;
    }
    if (reason.empty()) {
      d.row_ids.push_back(i);
    } else {
      ++d.report.reasons[reason];
    }
  }
  d.report.kept = d.row_ids.size();

  std::vector<std::vector<std::string>> levels;
  for (const auto& name : spec.categorical) {
    std::set<std::string> seen;
    for (std::size_t i : d.row_ids) seen.insert(*rows[i].categorical.at(name));
    // First level is the reference.
    levels.emplace_back(std::next(seen.begin(), seen.empty() ? 0 : 1), seen.end());
  }

  d.columns.push_back("(Intercept)");
  for (const auto& name : spec.continuous) d.columns.push_back(name);
  for (std::size_t c = 0; c < spec.categorical.size(); ++c)
    for (const auto& level : levels[c]) d.columns.push_back(spec.categorical[c] + "=" + level);

  d.x = Matrix(d.row_ids.size(), d.columns.size());
  for (std::size_t k = 0; k < d.row_ids.size(); ++k) {
    const auto& r = rows[d.row_ids[k]];
    auto out = d.x.row(k);
    std::size_t col = 0;
    out[col++] = 1.0;
    for (const auto& name : spec.continuous) out[col++] = *r.continuous.at(name);
    for (std::size_t c = 0; c < spec.categorical.size(); ++c) {
      const auto& value = *r.categorical.at(spec.categorical[c]);
      for (const auto& level : levels[c]) out[col++] = value == level ? 1.0 : 0.0;
    }
    d.y.push_back(*r.labels.at(spec.dependent));
  }

  if (d.x.rows() > 0) {
    const auto bad = dependent_columns(d.x);
    if (!bad.empty()) {
      std::string names;
      for (std::size_t j : bad) names += (names.empty() ? "" : ", ") + d.columns[j];
      throw Error(ErrorCode::kRankDeficient,
                  "model " + spec.name + ": collinear columns: " + names);
    }
  }
  return d;
}

std::string significance_stars(double p_value) {
  if (p_value < 0.001) return "***";
  if (p_value < 0.01) return "**";
  if (p_value < 0.05) return "*";
  return "";
}

const Coefficient* FitReport::find(const std::string& term) const {
  for (const auto& c : coefficients)
    if (c.term == term) return &c;
  return nullptr;
}

namespace {

double log_likelihood(const MatrixXd& x, const VectorXd& y, const VectorXd& beta) {
  const VectorXd eta = x * beta;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    // y*eta - log(1 + e^eta), stable for large |eta|.
    const double e = eta(i);
    const double softplus = e > 0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e));
    ll += y(i) * e - softplus;
  }
  return ll;
}

VectorXd probabilities(const MatrixXd& x, const VectorXd& beta) {
  VectorXd eta = x * beta;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    const double e = eta(i);
    eta(i) = e >= 0 ? 1.0 / (1.0 + std::exp(-e)) : std::exp(e) / (1.0 + std::exp(e));
  }
  return eta;
}

}  // namespace

FitReport fit_logit(const Design& design, const LogitOptions& options) {
  const std::size_t n = design.x.rows(), p = design.x.cols();
  const auto ones = std::count(design.y.begin(), design.y.end(), 1);
  if (ones == 0 || ones == static_cast<long>(n)) {
    throw Error(ErrorCode::kDegenerateLabels,
                "dependent variable has a single class over " + std::to_string(n) + " rows");
  }
  if (n <= p) {
    throw Error(ErrorCode::kInsufficientData,
                std::to_string(n) + " rows for " + std::to_string(p) + " parameters");
  }
  const MatrixXd x = to_eigen(design.x);
  VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) y(i) = design.y[i];

  VectorXd beta = VectorXd::Zero(p);
  double ll = log_likelihood(x, y, beta);
  VectorXd prob, grad;
  MatrixXd info;
  int iter = 0;
  bool converged = false;
  for (; iter <= options.max_iterations; ++iter) {
    prob = probabilities(x, beta);
    grad = x.transpose() * (y - prob);
    const VectorXd w = prob.array() * (1.0 - prob.array());
    info = x.transpose() * w.asDiagonal() * x;
    if (grad.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) {
      converged = true;
      break;
    }
    if (iter == options.max_iterations) break;
    const VectorXd step = info.ldlt().solve(grad);
    double t = 1.0;
    VectorXd next = beta + step;
    double next_ll = log_likelihood(x, y, next);
    // Near the optimum the log-likelihood change is below rounding noise, so
    // only a clear decrease triggers halving.
    const double noise = 1e-12 * (1.0 + std::abs(ll));
    for (int h = 0; h < 40 && !(next_ll >= ll - noise); ++h) {
      t *= 0.5;
      next = beta + t * step;
      next_ll = log_likelihood(x, y, next);
    }
    beta = next;
    ll = next_ll;
    if (!beta.allFinite() || beta.norm() > options.separation_norm) {
      throw Error(ErrorCode::kSeparation,
                  "coefficients diverge (norm " + format_number(beta.norm()) +
                      " at iteration " + std::to_string(iter + 1) + ")");
    }
  }
  // Perfect fits converge numerically only because the score underflows.
  if ((y - prob).lpNorm<Eigen::Infinity>() < 1e-6) {
    throw Error(ErrorCode::kSeparation, "fitted probabilities reproduce every label");
  }
  if (!converged) {
    throw Error(ErrorCode::kNonConvergence,
                "score max-norm " + format_number(grad.lpNorm<Eigen::Infinity>()) +
                    " after " + std::to_string(options.max_iterations) + " iterations");
  }

  const MatrixXd cov = info.ldlt().solve(MatrixXd::Identity(p, p));
  FitReport report;
  report.n = n;
  report.log_likelihood = ll;
  report.bic = static_cast<double>(p) * std::log(static_cast<double>(n)) - 2.0 * ll;
  report.iterations = iter;
  report.score_max_norm = grad.lpNorm<Eigen::Infinity>();
  report.row_ids = design.row_ids;
  report.drops = design.report;
  for (std::size_t j = 0; j < p; ++j) {
    Coefficient c;
    c.term = design.columns[j];
    c.estimate = beta(j);
    c.std_error = std::sqrt(std::max(0.0, cov(j, j)));
    c.z = c.std_error > 0 ? c.estimate / c.std_error : 0.0;
    c.p_value = std::erfc(std::abs(c.z) / std::sqrt(2.0));
    report.coefficients.push_back(c);
  }
  return report;
}

GridSpec sentiment_grid(const std::string& dependent) {
  GridSpec g;
  g.name = "sentiment";
  std::vector<std::string> cont;
  const std::vector<std::string> cats = {"sector", "year"};
  const std::vector<std::vector<std::string>> steps = {
      {},
      {"posemo", "negemo"},
      {"anx", "anger", "sad", "certain"},
      {"cogproc", "insight", "cause", "discrep"},
      kSalesEpsRegressors};
  for (std::size_t m = 0; m < steps.size(); ++m) {
    cont.insert(cont.end(), steps[m].begin(), steps[m].end());
    g.models.push_back({"Model " + std::to_string(m + 1), dependent, cont, cats});
  }
  return g;
}

GridSpec recommendation_grid(const std::string& dependent) {
  GridSpec g;
  g.name = "recommendation";
  const auto& cont = kSentimentRegressors;
  const std::vector<std::vector<std::string>> cats = {
      {}, {"MAR_1m"}, {"MAR_1m", "sector"}, {"MAR_1m", "sector", "year"},
      {"MAR_1m", "sector", "year", "MAR_5d"}};
  for (std::size_t m = 0; m < cats.size(); ++m)
    g.models.push_back({"Model " + std::to_string(m + 1), dependent, cont, cats[m]});
  return g;
}

std::vector<FitReport> run_model_grid(std::span<const RegressionRow> rows,
                                      const GridSpec& grid, const LogitOptions& options) {
  std::optional<std::vector<std::size_t>> common;
  if (grid.common_rows) {
    std::set<std::size_t> keep;
    for (std::size_t i = 0; i < rows.size(); ++i) keep.insert(i);
    for (const auto& spec : grid.models) {
      std::set<std::size_t> ok;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        auto has_label = r.labels.find(spec.dependent);
        bool good = has_label != r.labels.end() && has_label->second.has_value();
        for (const auto& c : spec.continuous) {
          auto it = r.continuous.find(c);
          good = good && it != r.continuous.end() && it->second && std::isfinite(*it->second);
        }
        for (const auto& c : spec.categorical) {
          auto it = r.categorical.find(c);
          good = good && it != r.categorical.end() && it->second.has_value();
        }
        if (good) ok.insert(i);
      }
      std::erase_if(keep, [&](std::size_t i) { return !ok.contains(i); });
    }
    common.emplace(keep.begin(), keep.end());
  }
  std::vector<FitReport> fits;
  for (const auto& spec : grid.models) {
    const Design d = build_design(rows, spec, common ? &*common : nullptr);
    FitReport f = fit_logit(d, options);
    f.model = spec.name;
    f.dependent = spec.dependent;
    fits.push_back(std::move(f));
  }
  return fits;
}

bool loglik_monotone(std::span<const FitReport> fits, double slack) {
  for (std::size_t m = 1; m < fits.size(); ++m) {
    if (fits[m].row_ids != fits[m - 1].row_ids) continue;
    if (fits[m].log_likelihood + slack < fits[m - 1].log_likelihood) return false;
  }
  return true;
}

Table regression_table(std::span<const FitReport> fits) {
  std::vector<std::string> header = {"Variable"};
  std::vector<std::string> terms;
  for (const auto& f : fits) {
    header.push_back(f.model);
    for (const auto& c : f.coefficients)
      if (std::find(terms.begin(), terms.end(), c.term) == terms.end()) terms.push_back(c.term);
  }
  Table t(header);
  for (const auto& term : terms) {
    std::vector<std::string> est = {term}, se = {""};
    for (const auto& f : fits) {
      const Coefficient* c = f.find(term);
      est.push_back(c ? format_number(c->estimate, 4) + significance_stars(c->p_value) : "");
      se.push_back(c ? "(" + format_number(c->std_error, 4) + ")" : "");
    }
    t.add_row(std::move(est));
    t.add_row(std::move(se));
  }
  std::vector<std::string> n = {"Observations"}, ll = {"Log-likelihood"}, bic = {"BIC"};
  for (const auto& f : fits) {
    n.push_back(std::to_string(f.n));
    ll.push_back(format_number(f.log_likelihood, 8));
    bic.push_back(format_number(f.bic, 8));
  }
  t.add_row(std::move(n));
  t.add_row(std::move(ll));
  t.add_row(std::move(bic));
  return t;
}

Table bic_table(std::span<const FitReport> fits) {
  Table t({"model", "n", "k", "log_likelihood", "bic", "delta_bic"});
  double best = std::numeric_limits<double>::infinity();
  for (const auto& f : fits) best = std::min(best, f.bic);
  for (const auto& f : fits) {
    t.add_row({f.model, std::to_string(f.n), std::to_string(f.coefficients.size()),
               format_number(f.log_likelihood, 8), format_number(f.bic, 8),
               format_number(f.bic - best, 8)});
  }
  return t;
}

}  // namespace ecpipe
