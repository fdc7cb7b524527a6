#include "livrank/econometrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "livrank/error.hpp"
#include "livrank/kernels.hpp"

namespace livrank {

namespace {

constexpr Regressor kCanonical[] = {Regressor::Tem2, Regressor::Tem, Regressor::Ter,
                                    Regressor::Fin,  Regressor::CInc, Regressor::VInc};
const std::string kConstant = "Constant";

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::string_view to_string(Regressor r) noexcept {
  switch (r) {
    case Regressor::Tem2: return "Tem2";
    case Regressor::Tem: return "Tem";
    case Regressor::Ter: return "Ter";
    case Regressor::Fin: return "Fin";
    case Regressor::CInc: return "CInc";
    case Regressor::VInc: return "VInc";
  }
  return "?";
}

Regressor parse_regressor(std::string_view text) {
  const std::string t = lower(text);
  for (Regressor r : kCanonical)
    if (lower(to_string(r)) == t) return r;
  if (t == "inc") return Regressor::VInc;
  throw ConfigError("unknown regressor \"" + std::string(text) + "\" (Tem2, Tem, Ter, Fin, CInc, VInc)");
}

void ModelSpec::validate() const {
  if (include.empty()) throw ConfigError("model needs at least one regressor");
  for (std::size_t i = 0; i < include.size(); ++i)
    for (std::size_t j = i + 1; j < include.size(); ++j)
      if (include[i] == include[j])
        throw ConfigError("regressor " + std::string(to_string(include[i])) + " listed twice");
  if (has(Regressor::Tem2) && !has(Regressor::Tem))
    throw ConfigError("Tem2 requires Tem: the quadratic term needs its linear term");
}

bool ModelSpec::has(Regressor r) const { return std::find(include.begin(), include.end(), r) != include.end(); }

ModelSpec ModelSpec::nested(int model) {
  ModelSpec s;
  s.include = {Regressor::Tem2, Regressor::Tem, Regressor::Ter};
  switch (model) {
    case 1: break;
    case 2: s.include.push_back(Regressor::Fin); break;
    case 3: s.include.push_back(Regressor::CInc); break;
    case 4: s.include.push_back(Regressor::VInc); break;
    case 5: s.include.insert(s.include.end(), {Regressor::Fin, Regressor::CInc, Regressor::VInc}); break;
    default: throw ConfigError("nested model must be 1..5, got " + std::to_string(model));
  }
  return s;
}

Design build_design(std::span<const SurveyRow> rows, const ModelSpec& spec) {
  spec.validate();
  std::vector<Regressor> cols;
  for (Regressor r : kCanonical)
    if (spec.has(r)) cols.push_back(r);

  auto value = [](const SurveyRow& row, Regressor r) -> std::optional<double> {
    switch (r) {
      case Regressor::Tem2: return row.tem * row.tem;
      case Regressor::Tem: return row.tem;
      case Regressor::Ter: return row.ter;
      case Regressor::Fin: return row.fin;
      case Regressor::CInc: return row.cinc;
      case Regressor::VInc: return row.vinc;
    }
    return std::nullopt;
  };

  std::vector<const SurveyRow*> kept;
  for (const auto& row : rows) {
    bool ok = row.livability.has_value();
    for (Regressor r : cols) ok = ok && value(row, r).has_value();
    if (ok) kept.push_back(&row);
  }

  Design d;
  d.intercept = spec.intercept;
  d.dropped = rows.size() - kept.size();
  if (kept.empty()) throw DataError("no usable rows: every row lacks livability or an included regressor");

  const auto n = static_cast<Eigen::Index>(kept.size());
  const Eigen::Index off = spec.intercept ? 1 : 0;
  d.x.resize(n, off + static_cast<Eigen::Index>(cols.size()));
  d.y.resize(n);
  if (spec.intercept) d.columns.push_back(kConstant);
  for (Regressor r : cols) d.columns.emplace_back(to_string(r));
  for (Eigen::Index i = 0; i < n; ++i) {
    const SurveyRow& row = *kept[static_cast<std::size_t>(i)];
    if (spec.intercept) d.x(i, 0) = 1.0;
    for (std::size_t j = 0; j < cols.size(); ++j) d.x(i, off + static_cast<Eigen::Index>(j)) = *value(row, cols[j]);
    d.y(i) = *row.livability;
    d.county_ids.push_back(row.county_id);
  }
  if (n > 1)
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const auto c = d.x.col(off + static_cast<Eigen::Index>(j));
      if (c.maxCoeff() == c.minCoeff())
        throw DataError("regressor " + std::string(to_string(cols[j])) + " is constant across the retained rows");
    }
  return d;
}

const TermEstimate& FitReport::term(std::string_view name) const {
  for (const auto& t : terms)
    if (t.name == name) return t;
  throw DataError("fit has no term \"" + std::string(name) + "\"");
}

std::string significance_stars(double p) {
  if (!(p < 0.1)) return "";
  if (p < 0.01) return "***";
  if (p < 0.05) return "**";
  return "*";
}

namespace {

double two_sided_t_p(double t, int df) {
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return 0.0;
  boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

}  // namespace

FitReport fit_ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::span<const std::string> names,
                  bool intercept) {
  const Eigen::Index n = x.rows(), k = x.cols();
  if (static_cast<std::size_t>(k) != names.size()) throw DataError("design has " + std::to_string(k) +
                                                                   " columns but " + std::to_string(names.size()) + " names");
  if (y.size() != n) throw DataError("response length does not match the design");
  if (k == 0) throw DataError("design has no columns");
  if (n <= k)
    throw DataError("too few observations: n = " + std::to_string(n) + " must exceed " + std::to_string(k) +
                    " columns");

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() < k) {
    std::string bad;
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index i = qr.rank(); i < k; ++i) {
      if (!bad.empty()) bad += ", ";
      bad += names[static_cast<std::size_t>(perm(i))];
    }
    throw DataError("design is rank deficient (rank " + std::to_string(qr.rank()) + " of " + std::to_string(k) +
                    "); collinear column(s): " + bad);
  }

  const Eigen::VectorXd beta = qr.solve(y);
  const Eigen::VectorXd resid = y - x * beta;
  double ssr = resid.squaredNorm();
  // Residuals at rounding level mean the response lies in the column space; treat the fit as exact.
  const double round_off = 64.0 * std::numeric_limits<double>::epsilon() * y.norm();
  if (ssr <= round_off * round_off) ssr = 0.0;
  const int df = static_cast<int>(n - k);
  const double s2 = ssr / df;

  // (X'X)^-1 = P R^-1 R^-T P'
  const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd rinv = r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
  const Eigen::MatrixXd cov_perm = rinv * rinv.transpose();
  const auto& perm = qr.colsPermutation().indices();

  FitReport rep;
  rep.n_obs = static_cast<std::size_t>(n);
  rep.df = df;
  rep.intercept = intercept;
  rep.residual_se = std::sqrt(s2);
  for (Eigen::Index j = 0; j < k; ++j) {
    Eigen::Index pj = 0;
    while (perm(pj) != j) ++pj;
    TermEstimate t;
    t.name = names[static_cast<std::size_t>(j)];
    t.coefficient = beta(j);
    t.std_error = std::sqrt(std::max(0.0, s2 * cov_perm(pj, pj)));
    if (t.std_error > 0.0) t.t_stat = t.coefficient / t.std_error;
    else t.t_stat = t.coefficient == 0.0 ? std::numeric_limits<double>::quiet_NaN()
                                         : std::copysign(std::numeric_limits<double>::infinity(), t.coefficient);
    t.p_value = std::isnan(t.t_stat) ? 1.0 : two_sided_t_p(t.t_stat, df);
    t.stars = significance_stars(t.p_value);
    rep.terms.push_back(std::move(t));
  }

  const double tss = intercept ? (y.array() - y.mean()).square().sum() : y.squaredNorm();
  const int icpt = intercept ? 1 : 0;
  rep.f_df1 = static_cast<int>(k) - icpt;
  rep.f_df2 = df;
  if (rep.f_df1 == 0) {
    rep.r2 = 0.0;
    rep.adj_r2 = 0.0;
    rep.f_stat = std::numeric_limits<double>::quiet_NaN();
    rep.f_p_value = std::numeric_limits<double>::quiet_NaN();
    return rep;
  }
  rep.r2 = tss > 0.0 ? 1.0 - ssr / tss : 1.0;
  rep.adj_r2 = 1.0 - (1.0 - rep.r2) * static_cast<double>(n - icpt) / static_cast<double>(df);
  if (rep.r2 >= 1.0) {
    rep.f_stat = std::numeric_limits<double>::infinity();
    rep.f_p_value = 0.0;
  } else {
    rep.f_stat = (rep.r2 / rep.f_df1) / ((1.0 - rep.r2) / df);
    boost::math::fisher_f dist(rep.f_df1, df);
    rep.f_p_value = boost::math::cdf(boost::math::complement(dist, rep.f_stat));
  }
  return rep;
}

FitReport fit_ols(const Design& d) { return fit_ols(d.x, d.y, d.columns, d.intercept); }

bool VifEntry::infinite() const noexcept { return std::isinf(value); }

std::vector<VifEntry> vif(const Eigen::MatrixXd& x, std::span<const std::string> names, bool intercept) {
  const Eigen::Index off = intercept ? 1 : 0;
  if (static_cast<std::size_t>(x.cols()) != names.size()) throw DataError("VIF: column/name count mismatch");
  const Eigen::Index p = x.cols() - off;
  if (p < 2) throw DataError("VIF needs at least 2 regressors besides the intercept");
  const Eigen::MatrixXd regs = x.rightCols(p);
  const std::vector<double> r2 = kernels::parallel::auxiliary_r2(regs);
  std::vector<VifEntry> out;
  for (Eigen::Index j = 0; j < p; ++j) {
    const double tol = 1.0 - r2[static_cast<std::size_t>(j)];
    VifEntry e;
    e.name = names[static_cast<std::size_t>(off + j)];
    e.value = tol < 1e-10 ? std::numeric_limits<double>::infinity() : 1.0 / tol;
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<VifEntry> vif(const Design& d) { return vif(d.x, d.columns, d.intercept); }

Vertex quad_vertex(double b_quad, double b_lin) {
  if (b_quad == 0.0 || !std::isfinite(b_quad) || !std::isfinite(b_lin))
    throw DataError("turning point needs a finite, non-zero quadratic coefficient");
  return {-b_lin / (2.0 * b_quad), b_quad < 0.0};
}

namespace {

std::string fixed(double v, int prec = 3) {
  if (std::isnan(v)) return "NA";
  if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
  std::ostringstream os;
  os << std::fixed << std::setprecision(prec) << v;
  return os.str();
}

}  // namespace

std::string format_regression_table(std::span<const std::pair<std::string, FitReport>> models) {
  std::vector<std::string> term_order;
  for (Regressor r : kCanonical) {
    const std::string name(to_string(r));
    for (const auto& [_, m] : models)
      if (std::any_of(m.terms.begin(), m.terms.end(), [&](const TermEstimate& t) { return t.name == name; })) {
        term_order.push_back(name);
        break;
      }
  }
  for (const auto& [_, m] : models)
    if (m.intercept) {
      term_order.push_back(kConstant);
      break;
    }

  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{""};
  for (const auto& [label, _] : models) header.push_back(label);
  rows.push_back(header);
  for (const auto& name : term_order) {
    std::vector<std::string> coef{name}, se{""};
    for (const auto& [_, m] : models) {
      auto it = std::find_if(m.terms.begin(), m.terms.end(), [&](const TermEstimate& t) { return t.name == name; });
      coef.push_back(it == m.terms.end() ? "" : fixed(it->coefficient) + it->stars);
      se.push_back(it == m.terms.end() ? "" : "(" + fixed(it->std_error) + ")");
    }
    rows.push_back(coef);
    rows.push_back(se);
  }
  auto stat_row = [&](std::string label, auto cell) {
    std::vector<std::string> row{std::move(label)};
    for (const auto& [_, m] : models) row.push_back(cell(m));
    rows.push_back(std::move(row));
  };
  stat_row("Observations", [](const FitReport& m) { return std::to_string(m.n_obs); });
  stat_row("R2", [](const FitReport& m) { return fixed(m.r2); });
  stat_row("Adjusted R2", [](const FitReport& m) { return fixed(m.adj_r2); });
  stat_row("Residual Std. Error",
           [](const FitReport& m) { return fixed(m.residual_se) + " (df = " + std::to_string(m.df) + ")"; });
  stat_row("F Statistic", [](const FitReport& m) {
    if (m.f_df1 == 0) return std::string("NA");
    return fixed(m.f_stat) + significance_stars(m.f_p_value) + " (df = " + std::to_string(m.f_df1) + "; " +
           std::to_string(m.f_df2) + ")";
  });

  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  std::size_t total = 0;
  for (auto w : width) total += w + 2;
  const std::string rule(total, '-');

  std::ostringstream os;
  os << rule << '\n';
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (r == 1 || r == 1 + 2 * term_order.size()) os << rule << '\n';
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      if (c == 0) os << std::left;
      else os << std::right;
      os << std::setw(static_cast<int>(width[c])) << rows[r][c] << "  ";
    }
    os << '\n';
  }
  os << rule << '\n' << "Note: *p<0.1; **p<0.05; ***p<0.01\n";
  return os.str();
}

nlohmann::json to_json(const FitReport& r) {
  auto num = [](double v) -> nlohmann::json { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : r.terms)
    terms.push_back({{"name", t.name},
                     {"coefficient", num(t.coefficient)},
                     {"std_error", num(t.std_error)},
                     {"t_stat", num(t.t_stat)},
                     {"p_value", num(t.p_value)},
                     {"stars", t.stars}});
  return {{"terms", terms},       {"r2", num(r.r2)},         {"adj_r2", num(r.adj_r2)},
          {"residual_se", num(r.residual_se)}, {"df", r.df}, {"f_stat", num(r.f_stat)},
          {"f_df1", r.f_df1},     {"f_df2", r.f_df2},        {"f_p_value", num(r.f_p_value)},
          {"n_obs", r.n_obs},     {"intercept", r.intercept}};
}

nlohmann::json to_json(std::span<const VifEntry> v) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& e : v)
    out.push_back({{"name", e.name},
                   {"vif", e.infinite() ? nlohmann::json("inf") : nlohmann::json(e.value)},
                   {"exceeds_threshold", e.value >= kVifThreshold}});
  return out;
}

}  // namespace livrank
