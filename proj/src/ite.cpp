#include "rdmatch/ite.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "rdmatch/bspline.hpp"
#include "rdmatch/error.hpp"
#include "rdmatch/linreg.hpp"
#include "rdmatch/seed.hpp"

namespace rdmatch {

namespace {

constexpr int kFolds = 4;
constexpr const char* kModelMagic = "rdmatch-ite-model";
constexpr int kModelVersion = 1;

// Fills `row` (length design.dimension()) for one covariate vector.
void design_row(const SplineDesign& design, std::span<const double> x, std::span<double> row,
                std::vector<double>& scratch, std::vector<double>& clamped) {
  const auto d = static_cast<std::size_t>(design.covariates());
  const auto df = static_cast<std::size_t>(design.df);
  clamped.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    const auto& k = design.knots[j];
    clamped[j] = std::clamp(x[j], k.front(), k.back());
  }
  std::size_t col = 0;
  row[col++] = 1.0;
  scratch.resize(df + 1);
  for (std::size_t j = 0; j < d; ++j) {
    bspline_basis(clamped[j], design.knots[j], design.degree, scratch);
    for (std::size_t b = 1; b <= df; ++b) row[col++] = scratch[b];
  }
  if (design.interactions) {
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t k = j + 1; k < d; ++k) row[col++] = clamped[j] * clamped[k];
    }
  }
}

double dot(std::span<const double> a, const Eigen::VectorXd& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b(static_cast<Eigen::Index>(i));
  return s;
}

bool is_fold_failure(const Error& e) {
  return category(e.code()) == ErrorCategory::Numeric || e.code() == ErrorCode::TooFewRows;
}

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& m, const std::vector<Eigen::Index>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = m.row(rows[k]);
  return out;
}

Eigen::VectorXd gather(const Eigen::VectorXd& v, const std::vector<Eigen::Index>& rows) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) out(static_cast<Eigen::Index>(k)) = v(rows[k]);
  return out;
}

}  // namespace

void SplineBasisSpec::validate() const {
  if (df_grid.empty()) throw Error(ErrorCode::InvalidArgument, "df grid is empty");
  for (std::size_t i = 0; i < df_grid.size(); ++i) {
    if (df_grid[i] < degree) {
      throw Error(ErrorCode::InvalidArgument, "df " + std::to_string(df_grid[i]) + " below degree " +
                                                  std::to_string(degree));
    }
    if (i > 0 && df_grid[i] <= df_grid[i - 1]) {
      throw Error(ErrorCode::InvalidArgument, "df grid must be strictly increasing");
    }
  }
}

Eigen::Index basis_dimension(Eigen::Index covariates, int df, bool interactions) {
  return 1 + covariates * df + (interactions ? covariates * (covariates - 1) / 2 : 0);
}

Eigen::Index SplineDesign::dimension() const noexcept { return basis_dimension(covariates(), df, interactions); }

SplineDesign make_design(const Eigen::MatrixXd& covariates, int df, const SplineBasisSpec& spec) {
  if (covariates.cols() < 1) throw Error(ErrorCode::ArityMismatch, "no covariates");
  SplineDesign design;
  design.df = df;
  design.degree = spec.degree;
  design.interactions = spec.interactions;
  for (Eigen::Index j = 0; j < covariates.cols(); ++j) {
    const Eigen::VectorXd col = covariates.col(j);
    try {
      design.knots.push_back(make_knots({col.data(), static_cast<std::size_t>(col.size())}, df, spec.degree));
    } catch (const Error& e) {
      throw e.with_context("covariate " + std::to_string(j));
    }
  }
  return design;
}

Eigen::MatrixXd build_basis(const Eigen::MatrixXd& covariates, const SplineDesign& design) {
  if (covariates.cols() != design.covariates()) {
    throw Error(ErrorCode::ArityMismatch, std::to_string(covariates.cols()) + " covariates, design expects " +
                                              std::to_string(design.covariates()));
  }
  const auto dim = design.dimension();
  // row-major so each design row is contiguous
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> out(covariates.rows(), dim);
  std::vector<double> x(static_cast<std::size_t>(covariates.cols())), scratch, clamped;
  for (Eigen::Index i = 0; i < covariates.rows(); ++i) {
    for (Eigen::Index j = 0; j < covariates.cols(); ++j) x[static_cast<std::size_t>(j)] = covariates(i, j);
    design_row(design, x, {out.row(i).data(), static_cast<std::size_t>(dim)}, scratch, clamped);
  }
  return out;
}

Eigen::MatrixXd build_basis(const Eigen::MatrixXd& covariates, int df, const SplineBasisSpec& spec) {
  const auto dim = basis_dimension(covariates.cols(), df, spec.interactions);
  if (covariates.rows() < dim) {
    throw Error(ErrorCode::TooFewRows, std::to_string(covariates.rows()) + " rows for a basis of dimension " +
                                           std::to_string(dim));
  }
  return build_basis(covariates, make_design(covariates, df, spec));
}

IteModel fit_spline_fixed(const Eigen::MatrixXd& covariates, const Eigen::VectorXd& response, int df,
                          const SplineBasisSpec& spec) {
  if (covariates.rows() != response.size()) {
    throw Error(ErrorCode::DimensionMismatch, "covariate and response row counts differ");
  }
  IteModel model;
  model.spec = spec;
  model.design = make_design(covariates, df, spec);
  const auto dim = model.design.dimension();
  if (covariates.rows() < dim) {
    throw Error(ErrorCode::TooFewRows, std::to_string(covariates.rows()) + " rows for a basis of dimension " +
                                           std::to_string(dim));
  }
  model.coef = ols(build_basis(covariates, model.design), response).coef;
  const Eigen::VectorXd fitted = predict_rows(model, covariates);
  model.training_mse = (response - fitted).squaredNorm() / static_cast<double>(response.size());
  return model;
}

IteModel fit_spline_cv(const Eigen::MatrixXd& covariates, const Eigen::VectorXd& response,
                       const SplineBasisSpec& spec, std::uint64_t cv_seed) {
  spec.validate();
  const auto m = covariates.rows();
  if (m != response.size()) throw Error(ErrorCode::DimensionMismatch, "covariate and response row counts differ");
  const auto max_dim = basis_dimension(covariates.cols(), spec.df_grid.back(), spec.interactions);
  if (m < max_dim) {
    throw Error(ErrorCode::TooFewRows, std::to_string(m) + " treated rows, largest basis has dimension " +
                                           std::to_string(max_dim));
  }

  std::vector<Eigen::Index> perm(static_cast<std::size_t>(m));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  Engine rng(derive_seed(cv_seed, Stream::CrossValidation, 0));
  for (std::size_t i = perm.size() - 1; i > 0; --i) {
    std::swap(perm[i], perm[static_cast<std::size_t>(rng() % (i + 1))]);
  }
  std::vector<int> fold_of(static_cast<std::size_t>(m));
  for (std::size_t k = 0; k < perm.size(); ++k) fold_of[static_cast<std::size_t>(perm[k])] = static_cast<int>(k % kFolds);

  std::vector<double> cv_mse;
  for (const int df : spec.df_grid) {
    double total = 0.0;
    bool ok = true;
    for (int f = 0; f < kFolds && ok; ++f) {
      std::vector<Eigen::Index> train, valid;
      for (Eigen::Index i = 0; i < m; ++i) (fold_of[static_cast<std::size_t>(i)] == f ? valid : train).push_back(i);
      try {
        const auto fit = fit_spline_fixed(gather_rows(covariates, train), gather(response, train), df, spec);
        const Eigen::VectorXd pred = predict_rows(fit, gather_rows(covariates, valid));
        total += (gather(response, valid) - pred).squaredNorm() / static_cast<double>(valid.size());
      } catch (const Error& e) {
        if (!is_fold_failure(e)) throw;
        ok = false;
      }
    }
    cv_mse.push_back(ok ? total / kFolds : std::numeric_limits<double>::infinity());
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < cv_mse.size(); ++i) {
    if (cv_mse[i] < cv_mse[best]) best = i;
  }
  if (!(cv_mse[best] < std::numeric_limits<double>::infinity())) {
    throw Error(ErrorCode::RankDeficient, "every df in the grid failed cross-validation");
  }
  auto model = fit_spline_fixed(covariates, response, spec.df_grid[best], spec);
  model.cv_mse = std::move(cv_mse);
  return model;
}

std::vector<std::size_t> treated_rows(const MatchResult& matches) {
  std::vector<std::size_t> rows;
  rows.reserve(matches.pairs.size());
  for (const auto& [t, c] : matches.pairs) rows.push_back(t);
  return rows;
}

Eigen::MatrixXd ite_covariates(const ObservationSet& obs, std::span<const std::size_t> rows,
                               std::span<const double> eta_hat, bool include_eta) {
  const auto dx = obs.dim_x();
  Eigen::MatrixXd cov(static_cast<Eigen::Index>(rows.size()), dx + (include_eta ? 1 : 0));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto r = rows[k];
    if (r >= obs.size() || (include_eta && r >= eta_hat.size())) {
      throw Error(ErrorCode::IndexOutOfRange, "row " + std::to_string(r));
    }
    const auto ki = static_cast<Eigen::Index>(k);
    cov.row(ki).head(dx) = obs.x().row(static_cast<Eigen::Index>(r));
    if (include_eta) cov(ki, dx) = eta_hat[r];
  }
  return cov;
}

IteModel fit_ite(const ObservationSet& obs, const BetaFit& beta, const MatchResult& matches,
                 std::span<const double> eta_hat, const SplineBasisSpec& spec, std::uint64_t cv_seed) {
  const auto rows = treated_rows(matches);
  const auto diffs = matched_differences(obs, beta.beta_hat, matches);
  const Eigen::VectorXd response = Eigen::Map<const Eigen::VectorXd>(diffs.data(), static_cast<Eigen::Index>(diffs.size()));
  return fit_spline_cv(ite_covariates(obs, rows, eta_hat, spec.include_eta), response, spec, cv_seed);
}

IteModel fit_ite(const ObservationSet& obs, const AttEstimate& est, const SplineBasisSpec& spec,
                 std::uint64_t cv_seed) {
  return fit_ite(obs, est.beta, est.matches, est.eta_hat, spec, cv_seed);
}

double predict_ite(const IteModel& model, std::span<const double> x, std::optional<double> eta_hat) {
  const auto d = static_cast<std::size_t>(model.design.covariates());
  const bool wants_eta = model.spec.include_eta;
  if (wants_eta != eta_hat.has_value()) {
    throw Error(ErrorCode::ArityMismatch, wants_eta ? "model needs eta_hat" : "model does not take eta_hat");
  }
  const std::size_t expected_x = wants_eta ? d - 1 : d;
  if (x.size() != expected_x) {
    throw Error(ErrorCode::ArityMismatch, std::to_string(x.size()) + " covariates, model expects " +
                                              std::to_string(expected_x));
  }
  std::vector<double> full(x.begin(), x.end());
  if (wants_eta) full.push_back(*eta_hat);
  std::vector<double> row(static_cast<std::size_t>(model.design.dimension())), scratch, clamped;
  design_row(model.design, full, row, scratch, clamped);
  return dot(row, model.coef);
}

Eigen::VectorXd predict_rows(const IteModel& model, const Eigen::MatrixXd& covariates) {
  if (covariates.cols() != model.design.covariates()) {
    throw Error(ErrorCode::ArityMismatch, "covariate matrix width does not match the model");
  }
  Eigen::VectorXd out(covariates.rows());
  std::vector<double> x(static_cast<std::size_t>(covariates.cols()));
  std::vector<double> row(static_cast<std::size_t>(model.design.dimension())), scratch, clamped;
  for (Eigen::Index i = 0; i < covariates.rows(); ++i) {
    for (Eigen::Index j = 0; j < covariates.cols(); ++j) x[static_cast<std::size_t>(j)] = covariates(i, j);
    design_row(model.design, x, row, scratch, clamped);
    out(i) = dot(row, model.coef);
  }
  return out;
}

double ite_mse(const IteModel& model, const ObservationSet& obs, std::span<const std::size_t> rows,
               std::span<const double> eta_hat, const std::function<double(std::size_t)>& truth) {
  if (rows.empty()) return 0.0;
  const Eigen::VectorXd pred = predict_rows(model, ite_covariates(obs, rows, eta_hat, model.spec.include_eta));
  double s = 0.0;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const double e = pred(static_cast<Eigen::Index>(k)) - truth(rows[k]);
    s += e * e;
  }
  return s / static_cast<double>(rows.size());
}

bool operator==(const IteModel& a, const IteModel& b) {
  return a.spec.df_grid == b.spec.df_grid && a.spec.degree == b.spec.degree &&
         a.spec.include_eta == b.spec.include_eta && a.spec.interactions == b.spec.interactions &&
         a.design.df == b.design.df && a.design.degree == b.design.degree &&
         a.design.interactions == b.design.interactions && a.design.knots == b.design.knots &&
         a.coef.size() == b.coef.size() && a.coef == b.coef && a.training_mse == b.training_mse &&
         a.cv_mse == b.cv_mse;
}

// ---------------------------------------------------------------------------
// model file
//
//   rdmatch-ite-model 1
//   degree 3
//   df 3
//   include_eta 0
//   interactions 1
//   df_grid <k> v...
//   covariates <d>
//   knots <len> v...        (d lines)
//   coef <p> v...
//   training_mse v
//   cv_mse <k> v...
// ---------------------------------------------------------------------------

std::string serialize_model(const IteModel& model) {
  std::ostringstream out;
  auto list = [&](const char* key, const auto& values) {
    out << key << ' ' << values.size();
    for (const auto v : values) out << ' ' << format_double(static_cast<double>(v));
    out << '\n';
  };
  out << kModelMagic << ' ' << kModelVersion << '\n';
  out << "degree " << model.design.degree << '\n';
  out << "df " << model.design.df << '\n';
  out << "include_eta " << (model.spec.include_eta ? 1 : 0) << '\n';
  out << "interactions " << (model.design.interactions ? 1 : 0) << '\n';
  list("df_grid", model.spec.df_grid);
  out << "covariates " << model.design.knots.size() << '\n';
  for (const auto& k : model.design.knots) list("knots", k);
  list("coef", std::vector<double>(model.coef.data(), model.coef.data() + model.coef.size()));
  out << "training_mse " << format_double(model.training_mse) << '\n';
  list("cv_mse", model.cv_mse);
  return out.str();
}

namespace {

class ModelReader {
 public:
  explicit ModelReader(const std::string& text) : in_(text) {}

  void expect(const std::string& key) {
    std::string got;
    if (!(in_ >> got) || got != key) fail("expected '" + key + "'");
  }

  double number() {
    std::string tok;
    if (!(in_ >> tok)) fail("unexpected end of model");
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) fail("bad number '" + tok + "'");
    return v;
  }

  long integer() {
    const double v = number();
    if (v != static_cast<double>(static_cast<long>(v))) fail("expected an integer");
    return static_cast<long>(v);
  }

  std::vector<double> list(const std::string& key) {
    expect(key);
    const long n = integer();
    if (n < 0 || n > 10'000'000) fail("bad length for '" + key + "'");
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = number();
    return v;
  }

  [[noreturn]] static void fail(const std::string& what) { throw Error(ErrorCode::ModelFormat, what); }

 private:
  std::istringstream in_;
};

}  // namespace

IteModel deserialize_model(const std::string& text) {
  ModelReader r(text);
  r.expect(kModelMagic);
  if (r.integer() != kModelVersion) ModelReader::fail("unsupported model version");
  IteModel m;
  r.expect("degree");
  m.design.degree = static_cast<int>(r.integer());
  m.spec.degree = m.design.degree;
  r.expect("df");
  m.design.df = static_cast<int>(r.integer());
  r.expect("include_eta");
  m.spec.include_eta = r.integer() != 0;
  r.expect("interactions");
  m.design.interactions = r.integer() != 0;
  m.spec.interactions = m.design.interactions;
  m.spec.df_grid.clear();
  for (const double v : r.list("df_grid")) m.spec.df_grid.push_back(static_cast<int>(v));
  r.expect("covariates");
  const long d = r.integer();
  if (d < 1) ModelReader::fail("model needs at least one covariate");
  for (long j = 0; j < d; ++j) m.design.knots.push_back(r.list("knots"));
  const auto coef = r.list("coef");
  m.coef = Eigen::Map<const Eigen::VectorXd>(coef.data(), static_cast<Eigen::Index>(coef.size()));
  r.expect("training_mse");
  m.training_mse = r.number();
  m.cv_mse = r.list("cv_mse");

  if (m.coef.size() != m.design.dimension()) ModelReader::fail("coefficient count does not match the basis");
  for (const auto& k : m.design.knots) {
    if (k.size() != static_cast<std::size_t>(m.design.df + m.design.degree + 2) || !std::is_sorted(k.begin(), k.end())) {
      ModelReader::fail("malformed knot vector");
    }
  }
  return m;
}

void save_model(const std::filesystem::path& path, const IteModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  out << serialize_model(model);
}

IteModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_model(buf.str());
}

}  // namespace rdmatch
