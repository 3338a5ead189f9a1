#pragma once

// Command-line front end: eval, sample, fit, regress, premium, grid, check.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gll/analysis.hpp"
#include "gll/dataset.hpp"
#include "gll/distribution.hpp"
#include "gll/errors.hpp"
#include "gll/estimator.hpp"
#include "gll/params.hpp"
#include "gll/premium.hpp"
#include "gll/regression.hpp"
#include "gll/sampler.hpp"

namespace gll::cli {

enum class Format { delimited, structured };

using Cell = std::variant<double, std::string, bool>;

/// A named table of output records. decimals[j] < 0 prints column j with %.10g.
struct Records {
  std::string name;
  std::vector<std::string> columns;
  std::vector<int> decimals;
  std::vector<std::vector<Cell>> rows;

  bool operator==(const Records& o) const { return name == o.name && columns == o.columns && rows == o.rows; }
};

using Document = std::vector<Records>;

inline constexpr int premium_dp = 3;
inline constexpr int density_dp = 6;
inline constexpr int estimate_dp = 4;
inline constexpr int sample_dp = 8;

inline std::string format_cell(const Cell& c, int decimals) {
  if (const auto* b = std::get_if<bool>(&c)) return *b ? "true" : "false";
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  const double v = std::get<double>(c);
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (decimals >= 0) return format_fixed(v, decimals);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

namespace detail {

inline nlohmann::ordered_json cell_json(const Cell& c) {
  if (const auto* b = std::get_if<bool>(&c)) return *b;
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  const double v = std::get<double>(c);
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

inline Cell parse_text_cell(const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  if (gll::detail::parse_double(s, v)) return v;
  return s;
}

}  // namespace detail

/// Delimited: per table a header row and fixed-precision rows, tables separated by a blank line.
/// Structured: JSON array of {"name", "columns", "rows"} with row objects keyed in column order.
inline std::string emit(const Document& doc, Format format, char delim = '\t') {
  std::ostringstream os;
  if (format == Format::delimited) {
    for (std::size_t k = 0; k < doc.size(); ++k) {
      const auto& r = doc[k];
      if (k > 0) os << '\n';
      for (std::size_t j = 0; j < r.columns.size(); ++j) os << (j ? std::string(1, delim) : "") << r.columns[j];
      os << '\n';
      for (const auto& row : r.rows) {
        for (std::size_t j = 0; j < row.size(); ++j) {
          const int dp = j < r.decimals.size() ? r.decimals[j] : -1;
          os << (j ? std::string(1, delim) : "") << format_cell(row[j], dp);
        }
        os << '\n';
      }
    }
    return os.str();
  }
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : doc) {
    nlohmann::ordered_json t;
    t["name"] = r.name;
    t["columns"] = r.columns;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : r.rows) {
      nlohmann::ordered_json o = nlohmann::ordered_json::object();
      for (std::size_t j = 0; j < row.size(); ++j) o[r.columns[j]] = detail::cell_json(row[j]);
      rows.push_back(std::move(o));
    }
    t["rows"] = std::move(rows);
    arr.push_back(std::move(t));
  }
  return arr.dump(2) + "\n";
}

/// Inverse of emit. Delimited input yields unnamed tables with the printed (rounded) values
/// and the column precision of the first row.
inline Document parse(const std::string& text, Format format, char delim = '\t') {
  Document doc;
  if (format == Format::structured) {
    const auto arr = nlohmann::ordered_json::parse(text);
    for (const auto& t : arr) {
      Records r;
      r.name = t.at("name").get<std::string>();
      r.columns = t.at("columns").get<std::vector<std::string>>();
      r.decimals.assign(r.columns.size(), -1);
      for (const auto& o : t.at("rows")) {
        std::vector<Cell> row;
        for (const auto& c : r.columns) {
          const auto& v = o.at(c);
          if (v.is_boolean()) {
            row.emplace_back(v.get<bool>());
          } else if (v.is_number()) {
            row.emplace_back(v.get<double>());
          } else {
            const auto s = v.get<std::string>();
            row.push_back(s == "nan" || s == "inf" || s == "-inf" ? detail::parse_text_cell(s) : Cell{s});
          }
        }
        r.rows.push_back(std::move(row));
      }
      doc.push_back(std::move(r));
    }
    return doc;
  }
  std::istringstream in(text);
  std::string line;
  Records cur;
  bool open = false;
  while (std::getline(in, line)) {
    if (line.empty()) {
      if (open) doc.push_back(std::move(cur));
      cur = Records{};
      open = false;
      continue;
    }
    auto fields = gll::detail::split(line, delim);
    if (!open) {
      cur.columns = fields;
      cur.decimals.assign(fields.size(), -1);
      open = true;
      continue;
    }
    std::vector<Cell> row;
    for (std::size_t j = 0; j < fields.size(); ++j) {
      row.push_back(detail::parse_text_cell(fields[j]));
      // keep the printed precision of the first numeric row
      const auto dot = fields[j].find('.');
      if (cur.rows.empty() && j < cur.decimals.size() && std::holds_alternative<double>(row.back()) &&
          fields[j].find_first_of("eE") == std::string::npos) {
        cur.decimals[j] = dot == std::string::npos ? 0 : static_cast<int>(fields[j].size() - dot - 1);
      }
    }
    cur.rows.push_back(std::move(row));
  }
  if (open) doc.push_back(std::move(cur));
  return doc;
}

// ---------------------------------------------------------------------------
// Argument helpers

struct ParamFlags {
  std::optional<double> theta, lambda, p, pi, mu, phi, gamma;

  bool any() const { return theta || lambda || p || pi || mu || phi || gamma; }

  GllParams resolve() const {
    if (mu || phi || gamma) {
      if (theta || lambda || pi) throw invalid_parameters("--mu/--phi/--gamma cannot be combined with --theta/--lambda/--pi");
      if (!mu || !phi || !gamma) throw invalid_parameters("mean form needs --mu, --phi and --gamma");
      return from_mean({*mu, *phi, *gamma});
    }
    if (!theta) throw invalid_parameters("--theta is required");
    if (pi) {
      if (lambda) throw invalid_parameters("--pi and --lambda are alternatives");
      return from_pi({*theta, *pi, p.value_or(0.0)});
    }
    GllParams g{*theta, lambda.value_or(0.0), p.value_or(0.0)};
    validate(g);
    return g;
  }
};

inline void add_param_flags(CLI::App* app, ParamFlags& f) {
  app->add_option("--theta", f.theta, "theta > 0");
  app->add_option("--lambda", f.lambda, "lambda >= 0 (default 0)");
  app->add_option("--p", f.p, "p >= 0 (default 0)");
  app->add_option("--pi", f.pi, "pi = lambda theta / (1 + lambda theta), replaces --lambda");
  app->add_option("--mu", f.mu, "mean (with --phi and --gamma)");
  app->add_option("--phi", f.phi, "dispersion");
  app->add_option("--gamma", f.gamma, "shape link, > 1");
}

/// kind:key=val,...  e.g. exponential:rate=0.5, weibull:shape=1.5,scale=0.5, inverse_gaussian:mean=2,shape=2
inline RiskModel parse_risk(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  std::map<std::string, double> kv;
  if (colon != std::string::npos) {
    for (const auto& item : gll::detail::split(spec.substr(colon + 1), ',')) {
      const auto eq = item.find('=');
      double v = 0.0;
      if (eq == std::string::npos || !gll::detail::parse_double(item.substr(eq + 1), v)) {
        throw std::invalid_argument("--risk: expected key=value, got '" + item + "'");
      }
      kv[gll::detail::trim(item.substr(0, eq))] = v;
    }
  }
  auto get = [&](const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw std::invalid_argument("--risk " + kind + ": missing " + key);
    return it->second;
  };
  auto expect = [&](std::size_t n) {
    if (kv.size() != n) throw std::invalid_argument("--risk " + kind + ": unexpected keys");
  };
  if (kind == "exponential" || kind == "exp") {
    expect(1);
    return RiskModel::exponential(get("rate"));
  }
  if (kind == "weibull") {
    expect(2);
    return RiskModel::weibull(get("shape"), get("scale"));
  }
  if (kind == "inverse_gaussian" || kind == "ig") {
    expect(2);
    return RiskModel::inverse_gaussian(get("mean"), get("shape"));
  }
  throw std::invalid_argument("--risk: unknown kind '" + kind + "' (exponential, weibull, inverse_gaussian)");
}

inline std::string param_label(const GllParams& g) {
  std::ostringstream os;
  os << "theta=" << g.theta << ",lambda=" << g.lambda << ",p=" << g.p;
  return os.str();
}

// ---------------------------------------------------------------------------
// Commands

inline Records eval_records(const GllParams& g, const std::string& what, const std::vector<double>& xs) {
  auto pointwise = [&](const std::string& col, auto fn) {
    if (xs.empty()) throw std::invalid_argument("eval " + what + " needs --x");
    Records r{"eval", {col, what}, {-1, density_dp}, {}};
    for (double x : xs) r.rows.push_back({x, fn(x)});
    return r;
  };
  auto scalar = [&](double v) { return Records{"eval", {what}, {density_dp}, {{v}}}; };
  if (what == "pdf") return pointwise("x", [&](double x) { return pdf(g, x); });
  if (what == "cdf") return pointwise("x", [&](double x) { return cdf(g, x); });
  if (what == "sf") return pointwise("x", [&](double x) { return survival(g, x); });
  if (what == "hazard") return pointwise("x", [&](double x) { return hazard(g, x); });
  if (what == "quantile") return pointwise("u", [&](double u) { return quantile(g, u); });
  if (what == "moment") return pointwise("r", [&](double r) { return moment(g, r); });
  if (what == "mean") return scalar(mean(g));
  if (what == "variance") return scalar(variance(g));
  if (what == "entropy") return scalar(entropy_closed(g).value);
  if (what == "mode") {
    const auto m = mode(g);
    const char* kind = m.kind == ModeKind::interior ? "interior" : (m.kind == ModeKind::at_zero ? "at_zero" : "at_one");
    return Records{"eval", {"mode", "kind"}, {density_dp, -1}, {{m.location, std::string(kind)}}};
  }
  throw std::invalid_argument("--what: unknown quantity '" + what +
                              "' (pdf, cdf, sf, hazard, quantile, moment, mean, variance, entropy, mode)");
}

inline Records grid_records(const GllParams& g, const std::string& what, std::size_t points) {
  if (points < 1) throw std::invalid_argument("grid: -n must be positive");
  Records r{"grid", {"x", what}, {density_dp, density_dp}, {}};
  for (std::size_t i = 1; i <= points; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(points + 1);
    double v = 0.0;
    if (what == "pdf") {
      v = pdf(g, x);
    } else if (what == "cdf") {
      v = cdf(g, x);
    } else if (what == "sf") {
      v = survival(g, x);
    } else if (what == "hazard") {
      try {
        v = hazard(g, x);
      } catch (const std::overflow_error&) {
        v = std::numeric_limits<double>::infinity();
      }
    } else {
      throw std::invalid_argument("--what: grid supports pdf, cdf, sf, hazard");
    }
    r.rows.push_back({x, v});
  }
  return r;
}

inline Document fit_document(const FitResult& f) {
  const auto se = f.standard_errors();
  Records est{"estimates", {"parameter", "estimate", "std_error"}, {-1, estimate_dp, estimate_dp}, {}};
  est.rows.push_back({std::string("theta"), f.params.theta, se(0)});
  est.rows.push_back({std::string("lambda"), f.params.lambda, se(1)});
  est.rows.push_back({std::string("p"), f.params.p, se(2)});
  Records sum{"summary",
              {"n", "loglik", "converged", "lambda_at_zero", "p_at_zero"},
              {0, estimate_dp, -1, -1, -1},
              {{static_cast<double>(f.n), f.loglik, f.converged, f.boundary.lambda_at_zero, f.boundary.p_at_zero}}};
  return {est, sum};
}

inline Document regression_document(const RegressionFit& f, const std::string& model, std::size_t n) {
  Records est{"estimates", {"parameter", "estimate", "std_error"}, {-1, estimate_dp, estimate_dp}, {}};
  for (Eigen::Index i = 0; i < f.estimates.size(); ++i) {
    est.rows.push_back({f.names[static_cast<std::size_t>(i)], f.estimates(i), f.std_errors(i)});
  }
  Records sum{"summary", {"model", "n", "loglik", "converged"}, {-1, 0, estimate_dp, -1},
              {{model, static_cast<double>(n), f.loglik, f.converged}}};
  return {est, sum};
}

inline Records premium_table_records(const PremiumTable& t) {
  Records r{"premium_table", {"risk"}, {-1}, {}};
  for (double n : t.ph_exponents) {
    std::ostringstream os;
    os << "P_n(n=" << n << ")";
    r.columns.push_back(os.str());
    r.decimals.push_back(premium_dp);
  }
  for (const auto& g : t.specs) {
    r.columns.push_back("P(" + param_label(g) + ")");
    r.decimals.push_back(premium_dp);
  }
  r.columns.push_back("bound_ok");
  r.decimals.push_back(-1);
  for (std::size_t i = 0; i < t.risks.size(); ++i) {
    std::vector<Cell> row{t.risks[i].label()};
    for (double v : t.ph[i]) row.emplace_back(v);
    for (double v : t.gll[i]) row.emplace_back(v);
    row.emplace_back(static_cast<bool>(t.bound_holds[i]));
    r.rows.push_back(std::move(row));
  }
  return r;
}

inline void add_report(Records& r, const GridReport& rep, const std::string& params) {
  const double x = rep.first_violation ? rep.first_violation->x : std::numeric_limits<double>::quiet_NaN();
  r.rows.push_back({rep.check, params, std::string(to_string(rep.verdict)), x, rep.message});
}

inline Records check_records(const std::optional<GllParams>& g) {
  Records r{"check", {"check", "params", "verdict", "violation_x", "message"}, {-1, -1, -1, -1, -1}, {}};
  auto single = [&](const GllParams& q) {
    const auto lc = log_concavity_check(q);
    add_report(r, lc.exact, param_label(q));
    add_report(r, lc.printed, param_label(q));
    add_report(r, cdf_shape_classify(q).report, param_label(q));
    add_report(r, dominance_check(q), param_label(q));
  };
  if (g) {
    single(*g);
    return r;
  }
  const GllParams a{1, 1, 2}, b{2, 2, 1};
  const std::string pair = param_label(a) + " vs " + param_label(b);
  add_report(r, lr_ratio_monotone(a, b), pair);
  add_report(r, moment_hazard_ordering(a, b), pair);
  const GllParams gp{1.5, 0.7, 1.0}, ll{1.5, 0.7, 0.0};
  add_report(r, lr_ratio_monotone(gp, ll), param_label(gp) + " vs " + param_label(ll));
  for (const GllParams& q : {GllParams{2, 1, 1}, GllParams{1.0001, 0, 0}, GllParams{0.7, 1, 2}, GllParams{2, 2, 0}}) {
    single(q);
  }
  return r;
}

// ---------------------------------------------------------------------------

inline void write_output(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot write '" + path + "'");
  f << text;
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

/// Exit codes: 0 success, 1 usage or validation error, 2 numeric non-convergence.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"generalized Log-Lindley toolkit"};
  app.name("gll");
  app.require_subcommand(1, 1);

  std::string format_name = "delimited";
  std::string out_path;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--format", format_name, "delimited or structured (json)")
        ->check(CLI::IsMember({"delimited", "structured", "json", "tsv"}));
    sub->add_option("--out", out_path, "write output to a file instead of stdout");
  };

  ParamFlags pf;
  std::vector<double> xs;
  std::string what;
  std::optional<std::uint64_t> seed;
  std::size_t count = 0;
  std::string file, response, covariates, model = "gll", risk, table;
  std::optional<double> ph;
  bool complement = false;
  double scale = 1.0;

  auto* eval = app.add_subcommand("eval", "evaluate pdf/cdf/sf/hazard/quantile/moment/mean/variance/entropy/mode");
  add_param_flags(eval, pf);
  eval->add_option("--x", xs, "points (or orders for moment, probabilities for quantile)")->delimiter(',');
  eval->add_option("--what", what, "quantity")->required();
  add_common(eval);

  auto* sample = app.add_subcommand("sample", "draw a seeded sample");
  add_param_flags(sample, pf);
  sample->add_option("-n", count, "sample size")->required();
  sample->add_option("--seed", seed, "random seed")->required();
  add_common(sample);

  auto* fit = app.add_subcommand("fit", "maximum likelihood fit to a data file");
  fit->add_option("file", file, "data file with a header row")->required();
  fit->add_option("--response", response, "column to fit (default: first)");
  fit->add_option("--model", model, "gll, ll (p = 0) or gamma (lambda = 0)")->check(CLI::IsMember({"gll", "ll", "gamma"}));
  fit->add_flag("--complement", complement, "fit 1 - y");
  add_common(fit);

  auto* regress = app.add_subcommand("regress", "theta-link or mean-link regression");
  regress->add_option("file", file, "data file with a header row")->required();
  regress->add_option("--response", response, "response column")->required();
  regress->add_option("--covariates", covariates, "comma-separated covariate columns");
  regress->add_option("--model", model, "theta, theta-ll, mean or mean-ll")
      ->check(CLI::IsMember({"theta", "theta-ll", "mean", "mean-ll"}));
  regress->add_option("--scale", scale, "multiply the response before fitting (e.g. 0.01 for percentages)");
  regress->add_flag("--complement", complement, "fit 1 - y");
  add_common(regress);

  auto* premium = app.add_subcommand("premium", "single premium cell or the table1 reproduction");
  premium->add_option("table", table, "table1")->check(CLI::IsMember({"table1"}));
  add_param_flags(premium, pf);
  premium->add_option("--risk", risk, "kind:key=val,... (exponential:rate, weibull:shape,scale, inverse_gaussian:mean,shape)");
  premium->add_option("--ph", ph, "proportional hazard exponent n in (0, 1]");
  add_common(premium);

  auto* grid = app.add_subcommand("grid", "curve over an equally spaced x grid");
  add_param_flags(grid, pf);
  grid->add_option("--what", what, "pdf, cdf, sf or hazard")->required();
  grid->add_option("-n", count, "number of interior points (default 99)");
  add_common(grid);

  auto* check = app.add_subcommand("check", "structural property checks");
  add_param_flags(check, pf);
  add_common(check);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 1;
  }

  const Format format = (format_name == "structured" || format_name == "json") ? Format::structured : Format::delimited;
  try {
    Document doc;
    if (eval->parsed()) {
      doc.push_back(eval_records(pf.resolve(), what, xs));
    } else if (sample->parsed()) {
      if (count < 1) throw std::invalid_argument("sample: -n must be positive");
      RngState rng(*seed);
      const auto draws = sample_gll(pf.resolve(), count, rng);
      Records r{"sample", {"x"}, {sample_dp}, {}};
      for (double v : draws) r.rows.push_back({v});
      doc.push_back(std::move(r));
    } else if (fit->parsed()) {
      const auto t = read_table(file);
      auto y = t.column(response.empty() ? t.header.front() : response);
      if (complement)
        for (auto& v : y) v = 1.0 - v;
      FitOptions opt;
      opt.fix_p_zero = model == "ll";
      opt.fix_lambda_zero = model == "gamma";
      doc = fit_document(fit_mle(Sample(std::move(y)), opt));
    } else if (regress->parsed()) {
      std::vector<std::string> cov;
      if (!covariates.empty()) {
        for (const auto& c : gll::detail::split(covariates, ',')) cov.push_back(gll::detail::trim(c));
      }
      const auto d = dataset_from_table(read_table(file), response, cov, scale, complement);
      if (model == "gll") model = "theta";
      RegressionOptions opt;
      if (model == "theta" || model == "theta-ll") {
        opt.fix_p_zero = model == "theta-ll";
        doc = regression_document(fit_theta_model(d, opt).fit, model, d.n());
      } else {
        opt.fix_gamma_one = model == "mean-ll";
        doc = regression_document(fit_mean_model(d, opt).fit, model, d.n());
      }
    } else if (premium->parsed()) {
      if (!table.empty()) {
        if (!risk.empty() || ph || pf.any()) throw std::invalid_argument("premium table1 takes no --risk/--ph/parameter flags");
        doc.push_back(premium_table_records(premium_table(table1_risks(), table1_exponents(), table1_specs())));
      } else {
        if (risk.empty()) throw std::invalid_argument("premium needs table1 or --risk");
        if (!ph && !pf.any()) throw std::invalid_argument("premium needs --ph and/or distortion parameters");
        const auto rm = parse_risk(risk);
        Records r{"premium", {"risk", "premium", "value"}, {-1, -1, premium_dp}, {}};
        if (ph) {
          std::ostringstream os;
          os << "P_n(n=" << *ph << ")";
          r.rows.push_back({rm.label(), os.str(), ph_premium(rm, *ph)});
        }
        if (pf.any()) {
          const auto g = pf.resolve();
          r.rows.push_back({rm.label(), "P(" + param_label(g) + ")", distorted_premium(rm, g)});
        }
        doc.push_back(std::move(r));
      }
    } else if (grid->parsed()) {
      doc.push_back(grid_records(pf.resolve(), what, count == 0 ? 99 : count));
    } else if (check->parsed()) {
      doc.push_back(check_records(pf.any() ? std::optional<GllParams>(pf.resolve()) : std::nullopt));
    }
    write_output(emit(doc, format), out_path, out);
    return 0;
  } catch (const convergence_error& e) {
    err << "error: did not converge: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace gll::cli
