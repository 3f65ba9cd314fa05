#include "rdmatch/cli.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "rdmatch/att.hpp"
#include "rdmatch/bootstrap.hpp"
#include "rdmatch/error.hpp"
#include "rdmatch/ite.hpp"
#include "rdmatch/simulate.hpp"
#include "rdmatch/stats.hpp"
#include "rdmatch/version.hpp"

namespace rdmatch::cli {

namespace {

using nlohmann::json;

json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw Error(ErrorCode::InvalidArgument, "empty entry in list '" + s + "'");
    out.push_back(item.substr(b, e - b + 1));
  }
  if (out.empty()) throw Error(ErrorCode::InvalidArgument, "empty list");
  return out;
}

std::vector<int> parse_int_list(const std::string& s, const char* flag) {
  std::vector<int> out;
  for (const auto& item : split_list(s)) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::InvalidArgument, std::string(flag) + ": '" + item + "' is not an integer");
    }
  }
  return out;
}

struct DataFlags {
  std::string data;
  std::string y, q, x, z;
  double tau = 0.0;
  bool crossfit = false;
  std::uint64_t seed = 0;
  bool add_intercept_z = false;
  bool no_shuffle = false;

  void attach(CLI::App* app, bool allow_crossfit = true) {
    app->add_option("--data", data, "input CSV with a header row")->required()->check(CLI::ExistingFile);
    app->add_option("--y", y, "outcome column")->required();
    app->add_option("--q", q, "score column")->required();
    app->add_option("--x", x, "comma-separated outcome covariate columns")->required();
    app->add_option("--z", z, "comma-separated score covariate columns")->required();
    app->add_option("--tau", tau, "treatment threshold; q >= tau is treated")->required();
    if (allow_crossfit) app->add_flag("--crossfit", crossfit, "average the three split-role rotations");
    app->add_option("--seed", seed, "seed for the split (and all derived randomness)");
    app->add_flag("--add-intercept-z", add_intercept_z, "append a constant column to Z");
    app->add_flag("--no-shuffle", no_shuffle, "split rows in file order instead of a seeded shuffle");
  }

  ObservationSet load() const {
    ColumnSpec spec{y, q, split_list(x), split_list(z), tau};
    auto obs = load_csv(data, spec);
    return add_intercept_z ? obs.with_intercept_z() : obs;
  }
};

class Manifest {
 public:
  Manifest(CLI::App* sub, std::string name) : sub_(sub), name_(std::move(name)), start_(Clock::now()) {}

  json finish(std::uint64_t seed, const std::optional<std::string>& input) const {
    json flags = json::object();
    for (const CLI::Option* opt : sub_->get_options()) {
      if (opt->get_name() == "--help") continue;
      std::string key = opt->get_name();
      if (opt->get_expected_min() == 0) {
        flags[key] = opt->count() > 0;
        continue;
      }
      if (opt->count() > 0) {
        const auto& r = opt->results();
        flags[key] = r.size() == 1 ? r.front() : CLI::detail::join(r, ",");
      } else if (!opt->get_default_str().empty()) {
        flags[key] = opt->get_default_str();
      }
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start_).count();
    return {
        {"subcommand", name_},
        {"flags", flags},
        {"seed", seed},
        {"version", kVersion},
        {"input_digest", input ? json(file_digest(*input)) : json(nullptr)},
        {"duration_seconds", secs},
    };
  }

 private:
  using Clock = std::chrono::steady_clock;
  CLI::App* sub_;
  std::string name_;
  Clock::time_point start_;
};

json estimate_json(const ObservationSet& obs, const DataFlags& f) {
  std::size_t treated = 0;
  for (std::size_t i = 0; i < obs.size(); ++i) treated += obs.treated(i) ? 1 : 0;
  json out;
  if (f.crossfit) {
    const auto cf = estimate_att_crossfit(obs, f.seed, !f.no_shuffle);
    out["theta_hat"] = cf.theta_cf;
    out["beta_hat"] = vec_json(cf.rotations[0].beta.beta_hat);
    out["gamma_hat"] = vec_json(cf.rotations[0].gamma.gamma_hat);
    json rot = json::array();
    for (const auto& r : cf.rotations) {
      rot.push_back({{"theta_hat", r.theta_hat},
                     {"beta_hat", vec_json(r.beta.beta_hat)},
                     {"gamma_hat", vec_json(r.gamma.gamma_hat)},
                     {"n_treated_matched", r.n_treated_i3},
                     {"n_control_matched", r.n_control_i3}});
    }
    out["rotations"] = rot;
  } else {
    const auto est = estimate_att(obs, split_three_way(obs.size(), f.seed, !f.no_shuffle));
    out["theta_hat"] = est.theta_hat;
    out["beta_hat"] = vec_json(est.beta.beta_hat);
    out["gamma_hat"] = vec_json(est.gamma.gamma_hat);
    out["n_treated_matched"] = est.n_treated_i3;
    out["n_control_matched"] = est.n_control_i3;
  }
  out["crossfit"] = f.crossfit;
  out["n"] = obs.size();
  out["n_treated"] = treated;
  out["n_control"] = obs.size() - treated;
  return out;
}

void write_predictions(const std::filesystem::path& path, const std::vector<std::string>& header,
                       const std::vector<std::vector<double>>& rows, const std::vector<double>& pred) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  for (const auto& h : header) out << h << ',';
  out << "alpha_hat\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const double v : rows[i]) out << format_double(v) << ',';
    out << format_double(pred[i]) << '\n';
  }
}

int exit_code_for(const Error& e) {
  switch (category(e.code())) {
    case ErrorCategory::Input: return kInputError;
    case ErrorCategory::Numeric: return kNumericError;
    case ErrorCategory::Bootstrap: return kBootstrapError;
  }
  return kUnexpected;
}

}  // namespace

std::string file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::IoError, "sha256 unavailable");
  }
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return hex.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Treatment-effect estimation for threshold-assigned treatments via residual differencing and matching"};
  app.name(args.empty() ? "rdmatch" : args.front());
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.set_version_flag("--version", std::string(kVersion));

  // estimate
  DataFlags est_flags;
  auto* est_cmd = app.add_subcommand("estimate", "estimate the average treatment effect on the treated");
  est_flags.attach(est_cmd);

  // bootstrap
  DataFlags boot_flags;
  std::size_t boot_b = 500;
  double boot_level = 0.95;
  unsigned boot_threads = 0;
  auto* boot_cmd = app.add_subcommand("bootstrap", "n-out-of-n bootstrap variance and percentile interval");
  boot_flags.attach(boot_cmd);
  boot_cmd->add_option("--b", boot_b, "bootstrap replicates");
  boot_cmd->add_option("--level", boot_level, "confidence level in (0, 1)");
  boot_cmd->add_option("--threads", boot_threads, "worker threads (0 = all cores); never changes results");

  // ite
  DataFlags ite_flags;
  std::string ite_df_grid = "3,4,5,6,8,10";
  bool ite_include_eta = false;
  bool ite_no_interactions = false;
  std::string ite_model_out, ite_predict_grid, ite_predict_out;
  auto* ite_cmd = app.add_subcommand("ite", "fit the individual treatment effect surface");
  ite_flags.attach(ite_cmd, false);
  ite_cmd->add_option("--df-grid", ite_df_grid, "comma-separated spline degrees of freedom to cross-validate");
  ite_cmd->add_option("--include-eta", ite_include_eta, "regress on eta_hat as well as X (true/false)");
  ite_cmd->add_flag("--no-interactions", ite_no_interactions, "drop the pairwise product terms");
  ite_cmd->add_option("--model-out", ite_model_out, "where to write the fitted model")->required();
  auto* grid_opt = ite_cmd->add_option("--predict-grid", ite_predict_grid,
                                       "CSV of query points (X columns, plus eta_hat when --include-eta)")
                       ->check(CLI::ExistingFile);
  ite_cmd->add_option("--predict-out", ite_predict_out, "CSV for predictions on --predict-grid")->needs(grid_opt);

  // simulate
  std::string sim_mode;
  std::size_t sim_n = 12'000, sim_reps = 300;
  std::uint64_t sim_seed = 0;
  bool sim_crossfit = false;
  std::string sim_out, sim_hist_out, sim_case = "x-eta", sim_df_grid = "3,4,5,6,8,10";
  unsigned sim_threads = 0;
  auto* sim_cmd = app.add_subcommand("simulate", "synthetic data and Monte-Carlo studies");
  sim_cmd->add_option("--mode", sim_mode, "gen | mc-att | mc-ite")
      ->required()
      ->check(CLI::IsMember({"gen", "mc-att", "mc-ite"}));
  sim_cmd->add_option("--n", sim_n, "rows per dataset");
  sim_cmd->add_option("--reps", sim_reps, "Monte-Carlo replicates");
  sim_cmd->add_option("--seed", sim_seed, "master seed");
  sim_cmd->add_flag("--crossfit", sim_crossfit, "cross-fitted estimator (mc-att)");
  sim_cmd->add_option("--out", sim_out, "output CSV (gen)");
  sim_cmd->add_option("--hist-out", sim_hist_out, "histogram CSV of zeta (mc-att)");
  sim_cmd->add_option("--case", sim_case, "x | x-eta: effect depends on X only or on X and eta")
      ->check(CLI::IsMember({"x", "x-eta"}));
  sim_cmd->add_option("--df-grid", sim_df_grid, "spline df grid (mc-ite)");
  sim_cmd->add_option("--threads", sim_threads, "worker threads (0 = all cores); never changes results");

  std::vector<std::string> argv_tail(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(argv_tail.begin(), argv_tail.end());
  try {
    app.parse(argv_tail);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << "error: " << e.what() << '\n';
    return kInputError;
  }

  try {
    json result;
    if (*est_cmd) {
      Manifest manifest(est_cmd, "estimate");
      const auto obs = est_flags.load();
      result = estimate_json(obs, est_flags);
      result["manifest"] = manifest.finish(est_flags.seed, est_flags.data);
    } else if (*boot_cmd) {
      Manifest manifest(boot_cmd, "bootstrap");
      const auto obs = boot_flags.load();
      const json point = estimate_json(obs, boot_flags);
      const auto res = bootstrap_att(obs, boot_b, boot_level, boot_flags.seed, boot_flags.crossfit, boot_threads);
      result = {
          {"theta_hat", point["theta_hat"]},
          {"sigma2_hat", res.sigma2_hat},
          {"ci", {res.ci_low, res.ci_high}},
          {"level", res.level},
          {"b", res.b_requested},
          {"b_failed", res.b_failed},
          {"replicate_mean", stats::mean(res.replicates)},
          {"crossfit", boot_flags.crossfit},
          {"n", obs.size()},
      };
      result["manifest"] = manifest.finish(boot_flags.seed, boot_flags.data);
    } else if (*ite_cmd) {
      Manifest manifest(ite_cmd, "ite");
      const auto obs = ite_flags.load();
      SplineBasisSpec spec;
      spec.df_grid = parse_int_list(ite_df_grid, "--df-grid");
      spec.include_eta = ite_include_eta;
      spec.interactions = !ite_no_interactions;
      spec.validate();
      const auto est = estimate_att(obs, split_three_way(obs.size(), ite_flags.seed, !ite_flags.no_shuffle));
      const auto model = fit_ite(obs, est, spec, ite_flags.seed);
      save_model(ite_model_out, model);
      result = {
          {"theta_hat", est.theta_hat},
          {"chosen_df", model.chosen_df()},
          {"df_grid", spec.df_grid},
          {"cv_mse", model.cv_mse},
          {"training_mse", model.training_mse},
          {"basis_dimension", model.design.dimension()},
          {"n_train", est.n_treated_i3},
          {"include_eta", spec.include_eta},
          {"model_out", ite_model_out},
      };
      if (!ite_predict_grid.empty()) {
        const auto table = read_numeric_csv(ite_predict_grid);
        std::vector<std::size_t> xcols;
        for (const auto& name : split_list(ite_flags.x)) xcols.push_back(table.column(name));
        std::optional<std::size_t> eta_col;
        if (spec.include_eta) eta_col = table.column("eta_hat");
        std::vector<double> pred;
        pred.reserve(table.rows.size());
        std::vector<double> xq(xcols.size());
        for (const auto& row : table.rows) {
          for (std::size_t j = 0; j < xcols.size(); ++j) xq[j] = row[xcols[j]];
          pred.push_back(predict_ite(model, xq, eta_col ? std::optional<double>(row[*eta_col]) : std::nullopt));
        }
        if (!ite_predict_out.empty()) {
          write_predictions(ite_predict_out, table.header, table.rows, pred);
          result["predict_out"] = ite_predict_out;
        } else {
          result["predictions"] = pred;
        }
      }
      result["manifest"] = manifest.finish(ite_flags.seed, ite_flags.data);
    } else if (*sim_cmd) {
      Manifest manifest(sim_cmd, "simulate");
      sim::DgpConfig cfg;
      cfg.n = sim_n;
      cfg.seed = sim_seed;
      cfg.ite_kind = sim_case == "x" ? sim::IteKind::XOnly : sim::IteKind::XandEta;
      if (sim_mode == "gen") {
        if (sim_out.empty()) throw Error(ErrorCode::InvalidArgument, "--out is required for --mode gen");
        const auto obs = sim::generate(cfg);
        sim::write_dgp_csv(sim_out, obs);
        result = {{"mode", sim_mode}, {"n", obs.size()}, {"out", sim_out}};
      } else if (sim_mode == "mc-att") {
        const auto report = sim::monte_carlo_att(cfg, sim_reps, sim_crossfit, sim_seed, sim_threads);
        result = sim::to_json(report);
        result["mode"] = sim_mode;
        if (!sim_hist_out.empty()) {
          sim::write_histogram_csv(sim_hist_out, report.histogram);
          result["hist_out"] = sim_hist_out;
        }
      } else {
        if (sim_reps < 1) throw Error(ErrorCode::InvalidArgument, "--reps must be at least 1");
        SplineBasisSpec spec;
        spec.df_grid = parse_int_list(sim_df_grid, "--df-grid");
        spec.include_eta = cfg.ite_kind == sim::IteKind::XandEta;
        std::vector<std::uint64_t> seeds(sim_reps);
        for (std::size_t k = 0; k < sim_reps; ++k) seeds[k] = sim::replicate_seed(sim_seed, k);
        const auto mses = sim::monte_carlo_ite(cfg, spec, seeds, sim_threads);
        result = {{"mode", sim_mode},        {"case", sim_case},
                  {"n", sim_n},              {"reps", sim_reps},
                  {"mses", mses},            {"median_mse", stats::median(mses)},
                  {"mean_mse", stats::mean(mses)}};
      }
      result["manifest"] = manifest.finish(sim_seed, std::nullopt);
    }
    out << result.dump(2) << '\n';
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUnexpected;
  }
}

}  // namespace rdmatch::cli
