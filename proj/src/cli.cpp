#include "mostowkit/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mostowkit/bounds.hpp"
#include "mostowkit/decompose.hpp"
#include "mostowkit/matcore.hpp"
#include "mostowkit/validate.hpp"

namespace mostowkit::cli {

json matrix_to_json(const Mat& m) {
  json data = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
    }
    data.push_back(std::move(row));
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

json matrix_to_json(const RMat& m) { return matrix_to_json(Mat(m.cast<cplx>())); }

namespace {

[[noreturn]] void parse_error(const std::string& what) {
  throw Error(ErrorCode::Parse, "matrix file: " + what);
}

double number(const json& j) {
  if (!j.is_number()) parse_error("entries must be numbers");
  return j.get<double>();
}

}  // namespace

Mat matrix_from_json(const json& j) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data")) {
    parse_error("expected an object with rows, cols and data");
  }
  if (!j["rows"].is_number_integer() || !j["cols"].is_number_integer()) {
    parse_error("rows and cols must be integers");
  }
  const long long rows = j["rows"].get<long long>();
  const long long cols = j["cols"].get<long long>();
  const json& data = j["data"];
  if (rows < 0 || cols < 0) parse_error("negative dimension");
  if (!data.is_array() || static_cast<long long>(data.size()) != rows) {
    parse_error("data must have one array per row");
  }
  Mat m(rows, cols);
  for (long long i = 0; i < rows; ++i) {
    const json& row = data[i];
    if (!row.is_array() || static_cast<long long>(row.size()) != cols) {
      parse_error("row " + std::to_string(i) + " has the wrong length");
    }
    for (long long k = 0; k < cols; ++k) {
      const json& e = row[k];
      if (!e.is_array() || e.size() != 2) parse_error("entries must be [re, im] pairs");
      m(i, k) = cplx(number(e[0]), number(e[1]));
    }
  }
  return m;
}

Mat read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Parse, "cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("matrix file: ") + e.what());
  }
  return matrix_from_json(j);
}

void write_matrix_file(const std::string& path, const Mat& m) {
  std::ofstream out(path);
  out << matrix_to_json(m).dump() << '\n';
}

json report_to_json(const Report& r) {
  json j{{"kind", r.kind}, {"meta", r.meta}, {"payload", r.payload}};
  if (r.error) j["error"] = {{"code", r.error->code}, {"message", r.error->message}};
  return j;
}

Report report_from_json(const json& j) {
  Report r;
  r.kind = j.at("kind").get<std::string>();
  r.meta = j.at("meta");
  r.payload = j.at("payload");
  if (j.contains("error")) {
    r.error = ErrorInfo{j["error"].at("code").get<std::string>(),
                        j["error"].at("message").get<std::string>()};
  }
  return r;
}

json make_meta(std::optional<std::uint64_t> seed, std::optional<NormKind> norm_kind,
               const json& branch_alpha) {
  json tolerances{{"tol_eig", tol::eig},   {"tol_fun", tol::fun},
                  {"tol_class", tol::cls}, {"tol_sing", tol::sing},
                  {"tol_quad", tol::quad}, {"tol_sep", tol::sep},
                  {"tol_syl", tol::syl},   {"tol_dec", tol::dec},
                  {"cond_cap", tol::cond_cap}, {"margin_delta", tol::margin_delta},
                  {"tol_fourier", tol::fourier}, {"tol_angle", tol::angle}};
  json meta{{"tool_version", kToolVersion}, {"tolerances", tolerances}};
  meta["seed"] = seed ? json(*seed) : json(nullptr);
  meta["norm_kind"] = norm_kind ? json(std::string(to_string(*norm_kind))) : json(nullptr);
  meta["branch_alpha"] = branch_alpha;
  return meta;
}

std::string sweep_csv(int n, const std::vector<double>& t_grid) {
  std::string out = "n,t,f_n,g_n\n";
  char buf[128];
  for (const validate::SweepRow& r : validate::zn_sweep(n, t_grid)) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", r.n, r.t, r.f_n, r.g_n);
    out += buf;
  }
  return out;
}

namespace {

json branch_json(const Branch& b) {
  return b.principal ? json("principal") : json(b.alpha);
}

json fourier_json(const bounds::FourierSequence& f) {
  return {{"delta", f.delta},
          {"n_trunc", f.n_trunc},
          {"double_l1_sum", f.double_l1_sum},
          {"tail_estimate", f.tail_estimate},
          {"analytic_cap", f.analytic_cap},
          {"fprime_l2", f.fprime_l2},
          {"reproduction_error", f.reproduction_error}};
}

json mostow_json(const decompose::MostowFactors& f) {
  return {{"W", matrix_to_json(f.W)},   {"K", matrix_to_json(f.K)},
          {"S", matrix_to_json(f.S)},   {"P1", matrix_to_json(f.P1)},
          {"P2", matrix_to_json(f.P2)}};
}

json split_json(const decompose::UnitarySplit& s) {
  return {{"W1", matrix_to_json(s.W1)}, {"W2", matrix_to_json(s.W2)},
          {"L", matrix_to_json(s.L)},   {"T", matrix_to_json(s.T)},
          {"sheet", branch_json(s.sheet)}, {"log_branch", branch_json(s.log_branch)}};
}

json mostow_bounds_json(const bounds::MostowBoundReport& r) {
  return {{"beta", r.beta},   {"k", r.k},         {"cond", r.condZ},
          {"b_W", r.b_W},     {"b_P1", r.b_P1},   {"b_P2", r.b_P2},
          {"b_P2_gram_form", r.b_P2_gram}, {"b_P1_alt", r.b_P1_alt}};
}

json bipolar_bounds_json(const bounds::BipolarBoundReport& r) {
  json j{{"k", r.k},
         {"C_eL", r.C_eL},
         {"C_eiT", r.C_eiT},
         {"C_WtW", r.C_WtW},
         {"fourier", fourier_json(r.fourier)},
         {"b_L", r.b_L},
         {"b_T", r.b_T},
         {"b_K", r.b_K},
         {"b_S", r.b_S},
         {"b_L_direct", r.b_L_direct},
         {"b_T_direct", r.b_T_direct},
         {"branch_alpha", branch_json(r.alpha)}};
  j["polar_comparison"] = r.polar_comparison ? json(*r.polar_comparison) : json(nullptr);
  return j;
}

json trial_json(const validate::PerturbationTrial& t) {
  json records = json::array();
  for (const auto& rec : t.records) {
    json r{{"eps", rec.eps}, {"skipped", rec.skipped}};
    if (rec.skipped) {
      r["reason"] = rec.reason;
    } else {
      json drift, ratio;
      for (int k = 0; k < validate::kFactorCount; ++k) {
        drift[validate::factor_name(k)] = rec.drift[k];
        ratio[validate::factor_name(k)] = rec.ratio[k];
      }
      r["drift"] = drift;
      r["ratio"] = ratio;
    }
    records.push_back(r);
  }
  json bound;
  for (int k = 0; k < validate::kFactorCount; ++k) bound[validate::factor_name(k)] = t.bound[k];
  return {{"seed", t.seed},
          {"direction", matrix_to_json(t.A)},
          {"bound", bound},
          {"records", records},
          {"passed", t.passed},
          {"worst_ratio", t.worst_ratio},
          {"worst_factor", t.worst_factor >= 0 ? validate::factor_name(t.worst_factor) : ""},
          {"worst_eps", t.worst_eps}};
}

struct Emitter {
  std::ostream& out;
  std::string path;

  void emit(const Report& r) const {
    const std::string text = report_to_json(r).dump(2) + "\n";
    if (path.empty()) {
      out << text;
    } else {
      std::ofstream f(path);
      f << text;
    }
  }
};

int math_failure(const Emitter& em, Report r, const Error& e, std::ostream& err) {
  r.error = ErrorInfo{std::string(to_string(e.code())), e.what()};
  em.emit(r);
  err << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
  return e.code() == ErrorCode::Parse ? kUsage : kMath;
}

std::optional<double> parse_alpha(const std::string& s) {
  if (s == "auto") return std::nullopt;
  std::size_t used = 0;
  const double a = std::stod(s, &used);
  if (used != s.size() || !std::isfinite(a)) throw std::invalid_argument("branch alpha");
  return a;
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mostow and bipolar decompositions with first-order perturbation bounds"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  std::string input, out_path, kind = "mostow", alpha_text = "auto", norm_text = "spectral";
  int trials = 5, n_sweep = 2, steps = 2000;
  std::uint64_t seed = 1;
  double eps_min = 1e-5, t_min = 0.0, t_max = 2.0 * kPi;

  CLI::App* dec = app.add_subcommand("decompose", "factor a matrix");
  dec->add_option("--input", input, "matrix file")->required();
  dec->add_option("--kind", kind)->check(CLI::IsMember({"mostow", "unitary", "bipolar"}));
  dec->add_option("--branch-alpha", alpha_text, "radians in [-pi, pi) or auto");
  dec->add_option("--out", out_path);

  CLI::App* bnd = app.add_subcommand("bounds", "first-order perturbation bounds");
  bnd->add_option("--input", input)->required();
  bnd->add_option("--norm", norm_text)->check(CLI::IsMember({"spectral", "frobenius"}));
  bnd->add_option("--out", out_path);

  CLI::App* val = app.add_subcommand("validate", "random perturbation trials");
  val->add_option("--input", input)->required();
  val->add_option("--trials", trials)->check(CLI::NonNegativeNumber);
  val->add_option("--seed", seed);
  val->add_option("--eps-min", eps_min)->check(CLI::Range(1e-12, 1e-2));
  val->add_option("--norm", norm_text)->check(CLI::IsMember({"spectral", "frobenius"}));
  val->add_option("--out", out_path);

  CLI::App* swp = app.add_subcommand("sweep", "f_n and g_n along the Z_n(t) family");
  swp->add_option("--n", n_sweep)->check(CLI::PositiveNumber);
  swp->add_option("--t-min", t_min);
  swp->add_option("--t-max", t_max);
  swp->add_option("--steps", steps)->check(CLI::PositiveNumber);
  swp->add_option("--out", out_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  const Emitter em{out, out_path};

  if (*swp) {
    if (!std::isfinite(t_min) || !std::isfinite(t_max)) {
      err << "error: t range must be finite\n";
      return kUsage;
    }
    const std::string csv = sweep_csv(n_sweep, validate::linspace(t_min, t_max, steps));
    if (out_path.empty()) {
      out << csv;
    } else {
      std::ofstream f(out_path, std::ios::binary);
      f << csv;
    }
    return kOk;
  }

  const NormKind nk = norm_kind_from_string(norm_text);
  std::optional<double> alpha;
  try {
    alpha = parse_alpha(alpha_text);
  } catch (const std::exception&) {
    err << "error: --branch-alpha must be a number or auto\n";
    return kUsage;
  }
  const json alpha_meta = alpha ? json(*alpha) : json("auto");

  Report report;
  Mat z;
  try {
    z = read_matrix_file(input);
    require_square(z, "input");
  } catch (const Error& e) {
    report.kind = *dec ? "decomposition" : *bnd ? "bounds" : "trial";
    report.meta = make_meta(std::nullopt, std::nullopt, alpha_meta);
    report.error = ErrorInfo{std::string(to_string(e.code())), e.what()};
    em.emit(report);
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  if (*dec) {
    report.kind = "decomposition";
    report.meta = make_meta(std::nullopt, std::nullopt, alpha_meta);
    try {
      if (kind == "mostow") {
        report.payload = {{"kind", "mostow"}, {"factors", mostow_json(decompose::mostow(z))}};
      } else if (kind == "unitary") {
        const decompose::UnitarySplit s = alpha ? decompose::unitary_split(z, Branch::at(*alpha))
                                                : decompose::unitary_split_auto(z);
        report.meta["branch_alpha"] = branch_json(s.sheet);
        report.payload = {{"kind", "unitary"}, {"factors", split_json(s)}};
      } else {
        decompose::BipolarOptions opts;
        if (alpha) {
          opts.automatic = false;
          opts.sheet = Branch::at(*alpha);
        }
        const decompose::BipolarFactors b = decompose::bipolar(z, opts);
        report.meta["branch_alpha"] = branch_json(b.alpha);
        json f = mostow_json(b.mostow);
        f["L"] = matrix_to_json(b.L);
        f["T"] = matrix_to_json(b.T);
        f["W1"] = matrix_to_json(b.split.W1);
        f["W2"] = matrix_to_json(b.split.W2);
        report.payload = {{"kind", "bipolar"}, {"factors", f}};
      }
    } catch (const Error& e) {
      return math_failure(em, report, e, err);
    }
    em.emit(report);
    return kOk;
  }

  if (*bnd) {
    report.kind = "bounds";
    report.meta = make_meta(std::nullopt, nk, "auto");
    try {
      const decompose::MostowFactors m = decompose::mostow(z);
      report.payload["mostow"] = mostow_bounds_json(bounds::mostow_bounds(z, m, nk));
      const bounds::BipolarBoundReport b = bounds::bipolar_bounds(z, nk);
      report.meta["branch_alpha"] = branch_json(b.alpha);
      report.payload["bipolar"] = bipolar_bounds_json(b);
    } catch (const Error& e) {
      return math_failure(em, report, e, err);
    }
    em.emit(report);
    return kOk;
  }

  // validate
  report.kind = "trial";
  report.meta = make_meta(seed, nk, "auto");
  validate::TrialOptions opts;
  opts.epsilons.clear();
  for (double e = 1e-2; e >= eps_min * (1.0 - 1e-12); e /= 10.0) opts.epsilons.push_back(e);
  if (opts.epsilons.empty() || opts.epsilons.back() > eps_min * (1.0 + 1e-12)) {
    opts.epsilons.push_back(eps_min);
  }
  std::vector<validate::PerturbationTrial> results;
  try {
    report.meta["branch_alpha"] = branch_json(decompose::bipolar(z).alpha);
    results = validate::run_trials(z, seed, trials, nk, opts);
  } catch (const Error& e) {
    return math_failure(em, report, e, err);
  }
  int passed = 0;
  double worst = 0.0;
  json list = json::array(), violations = json::array();
  for (const auto& t : results) {
    list.push_back(trial_json(t));
    worst = std::max(worst, t.worst_ratio);
    if (t.passed) {
      ++passed;
    } else {
      const std::string factor =
          t.worst_factor >= 0 ? validate::factor_name(t.worst_factor) : "none";
      violations.push_back({{"seed", t.seed}, {"factor", factor}, {"eps", t.worst_eps},
                            {"ratio", t.worst_ratio}});
      err << "violation: seed " << t.seed << " factor " << factor << " eps " << t.worst_eps
          << " ratio " << t.worst_ratio << "\n";
    }
  }
  const int failed = static_cast<int>(results.size()) - passed;
  report.payload = {{"trials", list},
                    {"summary",
                     {{"passed", passed},
                      {"failed", failed},
                      {"worst_ratio", worst},
                      {"slack", opts.slack},
                      {"violations", violations}}}};
  em.emit(report);
  return failed == 0 ? kOk : kViolation;
}

}  // namespace mostowkit::cli
