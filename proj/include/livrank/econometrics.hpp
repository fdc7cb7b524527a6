#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "livrank/corpus.hpp"

namespace livrank {

enum class Regressor { Tem2, Tem, Ter, Fin, CInc, VInc };
std::string_view to_string(Regressor r) noexcept;
Regressor parse_regressor(std::string_view text);

struct ModelSpec {
  std::vector<Regressor> include;  // kept in canonical order Tem2, Tem, Ter, Fin, CInc, VInc
  bool intercept = true;

  /// Throws ConfigError without regressors or with Tem2 lacking Tem.
  void validate() const;
  bool has(Regressor r) const;

  /// The nested livability specifications 1..5: geography baseline
  /// (Tem2, Tem, Ter), then + Fin, + CInc, + VInc, and all together.
  static ModelSpec nested(int model);
};

struct Design {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  std::vector<std::string> columns;  // "Constant" first when an intercept is present
  std::vector<std::string> county_ids;
  bool intercept = true;
  std::size_t dropped = 0;           // rows lacking a needed field
};

/// Listwise deletion of rows lacking livability or any included regressor.
Design build_design(std::span<const SurveyRow> rows, const ModelSpec& spec);

struct TermEstimate {
  std::string name;
  double coefficient = 0.0;
  double std_error = 0.0;
  double t_stat = 0.0;
  double p_value = 1.0;
  std::string stars;
};

struct FitReport {
  std::vector<TermEstimate> terms;
  double r2 = 0.0;
  double adj_r2 = 0.0;
  double residual_se = 0.0;
  int df = 0;            // residual degrees of freedom n - k
  double f_stat = 0.0;   // NaN when there is no non-intercept term
  int f_df1 = 0;
  int f_df2 = 0;
  double f_p_value = 1.0;
  std::size_t n_obs = 0;
  bool intercept = true;

  const TermEstimate& term(std::string_view name) const;
};

/// "***" p<0.01, "**" p<0.05, "*" p<0.1, else "".
std::string significance_stars(double p);

/// Classical OLS via column-pivoting QR. Throws DataError on rank deficiency
/// (naming the offending columns) or when n <= k.
FitReport fit_ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                  std::span<const std::string> names, bool intercept);
FitReport fit_ols(const Design& d);

struct VifEntry {
  std::string name;
  double value = 1.0;  // +inf under perfect collinearity
  bool infinite() const noexcept;
};

inline constexpr double kVifThreshold = 10.0;

/// VIF_j = 1 / (1 - R_j^2) from regressing regressor j on an intercept and
/// the other regressors. The intercept column, when present, is not reported.
std::vector<VifEntry> vif(const Eigen::MatrixXd& x, std::span<const std::string> names, bool intercept);
std::vector<VifEntry> vif(const Design& d);

struct Vertex {
  double location = 0.0;
  bool inverted_u = false;
};

/// Turning point -b_lin / (2 b_quad); concave (inverted U) when b_quad < 0.
Vertex quad_vertex(double b_quad, double b_lin);

/// Plain-text table: terms as rows, models as columns, followed by
/// Observations, R2, Adjusted R2, Residual Std. Error and F Statistic rows.
std::string format_regression_table(std::span<const std::pair<std::string, FitReport>> models);

nlohmann::json to_json(const FitReport& r);
nlohmann::json to_json(std::span<const VifEntry> v);

}  // namespace livrank
