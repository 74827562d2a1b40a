// freeprob: command-line surface over the free-probability toolkit.
// Exit codes: 0 pass, 1 computation error, 2 invariant/check failure, 64 usage.
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>

#include <CLI11.hpp>

#include "freeprob/info.hpp"
#include "freeprob/maxcorr.hpp"
#include "freeprob/projections.hpp"
#include "freeprob/rmt.hpp"
#include "freeprob/serialize.hpp"

using namespace freeprob;
using serialize::json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Options {
  std::string dist = "semicircular";
  double smooth = 0.0;
  std::string mode = "exact";
  int order = 16;
  std::string format = "table";
  std::string output;
  int threads = 1;  // modules are sequential; accepted for interface stability
};

// --dist grammar: semicircular | semicircular(mean,var) | bernoulli |
// uniform(a,b) | atomic(file.json)
struct DistSpec {
  std::string name;
  std::vector<double> params;
  std::string file;
};

DistSpec parse_dist(const std::string& s) {
  DistSpec d;
  auto open = s.find('(');
  if (open == std::string::npos) {
    d.name = s;
    return d;
  }
  if (s.back() != ')') throw CLI::ValidationError("--dist", "unbalanced parentheses in " + s);
  d.name = s.substr(0, open);
  std::string args = s.substr(open + 1, s.size() - open - 2);
  if (d.name == "atomic") {
    d.file = args;
    return d;
  }
  std::istringstream is(args);
  std::string tok;
  while (std::getline(is, tok, ',')) d.params.push_back(std::stod(tok));
  return d;
}

transforms::Measure measure_of(const Options& opt) {
  auto d = parse_dist(opt.dist);
  if (d.name == "semicircular")
    return transforms::Semicircular{d.params.size() > 0 ? d.params[0] : 0.0,
                                    d.params.size() > 1 ? d.params[1] : 1.0};
  if (d.name == "bernoulli") return transforms::Atomic{{{-1.0, 0.5}, {1.0, 0.5}}};
  if (d.name == "uniform") {
    if (d.params.size() != 2) throw CLI::ValidationError("--dist", "uniform needs (a,b)");
    const double a = d.params[0], b = d.params[1];
    if (!(a < b)) throw CLI::ValidationError("--dist", "uniform needs a < b");
    return transforms::GridDensity{a, b, std::vector<double>(2000, 1.0 / (b - a))};
  }
  if (d.name == "atomic") {
    std::ifstream in(d.file);
    if (!in) throw CLI::ValidationError("--dist", "cannot open " + d.file);
    return serialize::measure_from_json(json::parse(in));
  }
  throw CLI::ValidationError("--dist", "unknown distribution " + opt.dist);
}

// exact cumulants of the base law (double params embed exactly into mpq)
moments::CumulantSequence<Rational> cumulants_of(const Options& opt) {
  auto d = parse_dist(opt.dist);
  moments::CumulantSequence<Rational> k;
  if (d.name == "semicircular") {
    k = moments::semicircular_cumulants<Rational>(
        Rational(d.params.size() > 0 ? d.params[0] : 0.0),
        Rational(d.params.size() > 1 ? d.params[1] : 1.0), opt.order);
  } else if (d.name == "bernoulli") {
    k = moments::bernoulli_cumulants<Rational>(opt.order);
  } else if (d.name == "uniform") {
    if (d.params.size() != 2) throw CLI::ValidationError("--dist", "uniform needs (a,b)");
    k = moments::uniform_cumulants<Rational>(Rational(d.params[0]), Rational(d.params[1]),
                                             opt.order);
  } else if (d.name == "atomic") {
    auto mu = measure_of(opt);
    const auto& a = std::get<transforms::Atomic>(mu);
    std::vector<Rational> m(opt.order, Rational(0));
    for (auto& [t, w] : a.atoms) {
      Rational p(1), tq(t), wq(w);
      for (int r = 1; r <= opt.order; ++r) {
        p *= tq;
        m[r - 1] += wq * p;
      }
    }
    k = moments::moments_to_cumulants(moments::MomentSequence<Rational>{std::move(m)});
  } else {
    throw CLI::ValidationError("--dist", "unknown distribution " + opt.dist);
  }
  if (opt.smooth > 0.0) k.k[1] += Rational(opt.smooth);  // boxplus Semicircular(0, t)
  return k;
}

moments::CumulantSequence<double> to_d(const moments::CumulantSequence<Rational>& k) {
  std::vector<double> v;
  for (const auto& x : k.k) v.push_back(to_double(x));
  return moments::CumulantSequence<double>{v};
}

json config_json(const Options& opt, const std::string& subcommand) {
  return {{"subcommand", subcommand}, {"dist", opt.dist},     {"smooth", opt.smooth},
          {"mode", opt.mode},         {"order", opt.order},   {"format", opt.format},
          {"version", kVersion},      {"threads", opt.threads}};
}

void emit(const Options& opt, const std::string& text) {
  if (opt.output.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << "\n";
  } else {
    std::ofstream out(opt.output);
    if (!out) throw std::runtime_error("cannot write " + opt.output);
    out << text;
  }
}

void emit_report(const Options& opt, const std::string& subcommand, const json& result,
                 const std::string& csv = "", const std::string& table = "") {
  if (opt.format == "json") {
    json rep = {{"config", config_json(opt, subcommand)}, {"result", result}};
    emit(opt, rep.dump(2));
  } else if (opt.format == "csv" && !csv.empty()) {
    emit(opt, csv);
  } else if (!table.empty()) {
    emit(opt, table);
  } else {
    emit(opt, result.dump(2));
  }
}

template <class T>
std::string seq_csv(const char* kind, const std::vector<T>& vals) {
  std::ostringstream os;
  os.precision(17);
  os << "r," << kind << "\n";
  for (size_t r = 0; r < vals.size(); ++r) os << r + 1 << "," << to_double(vals[r]) << "\n";
  return os.str();
}

int cmd_sequence(const Options& opt, bool want_moments) {
  auto k = cumulants_of(opt);
  const char* kind = want_moments ? "moment" : "cumulant";
  if (opt.mode == "exact") {
    if (want_moments) {
      auto m = moments::cumulants_to_moments(k);
      emit_report(opt, "moments", serialize::json_of(m), seq_csv(kind, m.m));
    } else {
      emit_report(opt, "cumulants", serialize::json_of(k), seq_csv(kind, k.k));
    }
  } else {
    auto kd = to_d(k);
    if (want_moments) {
      auto m = moments::cumulants_to_moments(kd);
      emit_report(opt, "moments", serialize::json_of(m), seq_csv(kind, m.m));
    } else {
      emit_report(opt, "cumulants", serialize::json_of(kd), seq_csv(kind, kd.k));
    }
  }
  return 0;
}

int cmd_convolve(const Options& opt, const std::string& with) {
  Options o2 = opt;
  o2.dist = with;
  o2.smooth = 0.0;
  auto ka = cumulants_of(opt), kb = cumulants_of(o2);
  for (int r = 0; r < ka.order(); ++r) ka.k[r] += kb.k[r];
  auto m = moments::cumulants_to_moments(ka);
  json res = {{"convolution_of", {opt.dist, with}},
              {"cumulants", serialize::json_of(ka)},
              {"moments", serialize::json_of(m)}};
  emit_report(opt, "convolve", res, seq_csv("moment", m.m));
  return 0;
}

int cmd_density(const Options& opt, int grid) {
  auto kd = to_d(cumulants_of(opt));
  try {
    auto rec = transforms::density_from_cumulants(kd.k, grid);
    json res = {{"density", serialize::json_of(rec.density)},
                {"mass_delta", rec.mass_delta},
                {"clamp_delta", rec.clamp_delta},
                {"window_expansions", rec.window_expansions},
                {"eps_final", rec.eps_final}};
    emit_report(opt, "density", res, serialize::csv_of(rec.density));
    return 0;
  } catch (const AtomicSpectrumError& e) {
    std::cerr << "atomic spectrum: " << e.what() << "\n";
    return 1;
  }
}

algebra::Polynomial<Rational> poly_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open polynomial file " + path);
  algebra::Polynomial<Rational> p;
  for (const auto& term : json::parse(in)) {
    algebra::Word w = term.at("word").get<algebra::Word>();
    const auto& c = term.at("coeff");
    if (c.is_string()) {
      std::string s = c.get<std::string>();
      p.add_term(w, Rational(s));
    } else {
      p.add_term(w, Rational(c.get<double>()));
    }
  }
  return p;
}

int cmd_project(const Options& opt, const std::string& poly_file, std::vector<int> subset,
                int letters, int degree, bool efron_stein) {
  auto z = poly_from_file(poly_file);
  auto family = moments::FreeFamily<Rational>::iid(cumulants_of(opt), letters);
  if (efron_stein) {
    auto comp = projections::efron_stein_component(z, subset, degree, family);
    auto dec = projections::verify_decomposition(z, subset, degree, family);
    json res = {{"component", serialize::json_of(comp)},
                {"decomposition_max_coeff_deviation", dec.max_coeff_deviation},
                {"decomposition_l2_deviation", dec.l2_deviation}};
    emit_report(opt, "efron-stein", res);
    return dec.max_coeff_deviation == 0.0 && dec.l2_deviation == 0.0 ? 0 : 2;
  }
  auto pr = projections::conditional_expectation(z, subset, degree, family);
  emit_report(opt, "project", serialize::json_of(pr));
  return 0;
}

int cmd_maxcorr(const Options& opt, int m, int n, int degree) {
  maxcorr::CorrelationReport rep;
  if (opt.mode == "exact")
    rep = maxcorr::max_correlation(m, n, degree, cumulants_of(opt), opt.dist);
  else
    rep = maxcorr::max_correlation(m, n, degree, to_d(cumulants_of(opt)), opt.dist);
  const bool pass = rep.deviation <= 1e-6;
  json res = serialize::json_of(rep);
  res["pass"] = pass;
  std::ostringstream table;
  table.precision(10);
  table << "rho_max      " << rep.rho_max << "\ntheoretical  " << rep.theoretical
        << "\ndeviation    " << rep.deviation << "\n"
        << (pass ? "pass" : "FAIL") << "\n";
  emit_report(opt, "maxcorr", res, "", table.str());
  return pass ? 0 : 2;
}

int cmd_entropy(const Options& opt, int grid) {
  double chi;
  json extra;
  auto d = parse_dist(opt.dist);
  if (opt.smooth <= 0.0 && (d.name == "semicircular" || d.name == "uniform")) {
    chi = info::free_entropy(measure_of(opt));
    extra = {{"method", "closed-form density"}};
  } else if (opt.smooth <= 0.0 && (d.name == "bernoulli" || d.name == "atomic")) {
    chi = info::free_entropy(measure_of(opt));
    extra = {{"method", "atomic"}};
  } else {
    auto kd = to_d(cumulants_of(opt));
    try {
      auto rec = transforms::density_from_cumulants(kd.k, grid);
      chi = info::free_entropy(transforms::Measure{rec.density});
      extra = {{"method", "density recovery"}, {"mass_delta", rec.mass_delta}};
    } catch (const AtomicSpectrumError&) {
      chi = -std::numeric_limits<double>::infinity();
      extra = {{"method", "atomic"}};
    }
  }
  json res = {{"chi", std::isinf(chi) ? json("-inf") : json(chi)}};
  res.update(extra);
  std::ostringstream table;
  table.precision(10);
  table << "chi  " << chi << "\n";
  emit_report(opt, "entropy", res, "", table.str());
  return 0;
}

int cmd_fisher(const Options& opt, int degree) {
  auto k = cumulants_of(opt);
  auto m = moments::cumulants_to_moments(k);
  std::vector<double> md;
  for (const auto& v : m.m) md.push_back(to_double(v));
  auto res = info::fisher_information(moments::MomentSequence<double>{md}, degree);
  json j = serialize::json_of(res);
  if (opt.mode == "exact") {
    auto exact = info::fisher_information_exact(m, degree);
    j["phi_exact"] = exact ? serialize::scalar_json(*exact) : json(nullptr);
  }
  std::ostringstream table;
  table.precision(10);
  table << "Phi_" << degree << "  " << res.phi << "\nxi coefficients ";
  for (double c : res.conjugate_coeffs) table << c << " ";
  table << "\ndivergent  " << (res.divergent ? "yes" : "no") << "\n";
  emit_report(opt, "fisher", j, "", table.str());
  return 0;
}

int cmd_monotonicity(const Options& opt, int nmax, int degree, int grid) {
  auto rep = info::monotonicity_report(cumulants_of(opt), nmax, degree, opt.order, grid,
                                       opt.dist + (opt.smooth > 0.0
                                                       ? "+sc(" + std::to_string(opt.smooth) + ")"
                                                       : ""));
  std::ostringstream table;
  table.precision(10);
  table << "n    chi           phi\n";
  for (const auto& r : rep.rows)
    table << r.n << "    " << r.chi << "    " << (r.phi_finite ? std::to_string(r.phi) : "inf")
          << "\n";
  table << "chi non-decreasing: " << (rep.chi_nondecreasing ? "pass" : "FAIL")
        << "\nphi non-increasing: " << (rep.phi_nonincreasing ? "pass" : "FAIL") << "\n";
  emit_report(opt, "monotonicity", serialize::json_of(rep), serialize::csv_of(rep), table.str());
  return rep.chi_nondecreasing && rep.phi_nonincreasing ? 0 : 2;
}

int cmd_rmt_check(const Options& opt, int N, int T, std::uint64_t seed) {
  auto mu = measure_of(opt);
  auto family = moments::FreeFamily<double>::iid(to_d(cumulants_of(opt)), 2);
  std::vector<std::vector<int>> words;
  for (int len : {2, 3, 4})
    for (int mask = 0; mask < (1 << len); ++mask) {
      std::vector<int> w(len);
      for (int i = 0; i < len; ++i) w[i] = (mask >> i & 1) + 1;
      words.push_back(w);
    }
  rmt::EnsembleSpec spec{N, T, seed};
  std::vector<rmt::QuantileFn> letters{rmt::quantile_of(mu), rmt::quantile_of(mu)};
  auto est = rmt::estimate_mixed_moments(words, letters, spec);
  int ok = 0;
  json rows = json::array();
  for (size_t i = 0; i < words.size(); ++i) {
    const double engine = family.mixed_moment(words[i]);
    const bool pass = std::abs(est[i].mean - engine) <= 3.0 * est[i].stderr_ + 1e-12;
    ok += pass;
    rows.push_back({{"word", words[i]},
                    {"engine", engine},
                    {"mean", est[i].mean},
                    {"stderr", est[i].stderr_},
                    {"pass", pass}});
  }
  const double rho = rmt::empirical_max_correlation(1, 2, 2, letters[0], spec);
  json res = {{"N", N},    {"T", T},           {"seed", seed},
              {"words", rows}, {"words_passed", ok}, {"empirical_rho_12", rho}};
  std::ostringstream table;
  table.precision(6);
  table << "words within 3 stderr: " << ok << "/" << words.size() << "\nempirical rho(1,2): "
        << rho << " (theory 0.70711)\n";
  emit_report(opt, "rmt-check", res, "", table.str());
  const bool pass = ok >= static_cast<int>(words.size() * 95 / 100) && std::abs(rho - M_SQRT1_2) < 0.02;
  return pass ? 0 : 2;
}

int cmd_verify(const Options& opt) {
  int failures = 0;
  auto check = [&](const char* name, bool ok) {
    std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", name);
    if (!ok) ++failures;
  };
  // combinatorial kernel
  bool nc_ok = true;
  for (int r = 1; r <= 8; ++r)
    nc_ok = nc_ok && nc::enumerate_nc(r).size() == static_cast<size_t>(catalan(r));
  check("non-crossing partition counts", nc_ok);
  // round-trip
  std::mt19937 rng(3);
  std::uniform_int_distribution<long> num(-9, 9), den(1, 6);
  bool rt_ok = true;
  for (int t = 0; t < 20; ++t) {
    std::vector<Rational> m(10);
    for (auto& v : m) v = make_rational(num(rng), den(rng));
    moments::MomentSequence<Rational> mom{m};
    rt_ok = rt_ok &&
            moments::cumulants_to_moments(moments::moments_to_cumulants(mom)) == mom;
  }
  check("moment-cumulant round trip", rt_ok);
  // maximal correlation theorem
  bool mc_ok = true;
  auto kd = to_d(cumulants_of(opt));
  for (int n = 2; n <= 4; ++n)
    for (int m = 1; m < n; ++m) {
      auto rep = maxcorr::max_correlation(m, n, 3, kd, opt.dist);
      mc_ok = mc_ok && rep.deviation <= 1e-6;
    }
  check("maximal correlation sqrt(m/n)", mc_ok);
  // projection identities
  auto family = moments::FreeFamily<Rational>::iid(cumulants_of(opt), 3);
  bool proj_ok = true;
  std::uniform_int_distribution<int> lab(1, 3), len(0, 3), nterms(1, 4);
  for (int t = 0; t < 5; ++t) {
    algebra::Polynomial<Rational> z;
    const int k = nterms(rng);
    for (int j = 0; j < k; ++j) {
      algebra::Word w(len(rng));
      for (auto& l : w) l = lab(rng);
      z.add_term(w, make_rational(num(rng), std::max(1L, den(rng))));
    }
    auto dec = projections::verify_decomposition(z, {1, 2}, 3, family);
    proj_ok = proj_ok && dec.max_coeff_deviation == 0.0 && dec.l2_deviation == 0.0;
  }
  check("Efron-Stein decomposition", proj_ok);
  // entropy and Fisher values
  const double chi_sc = info::free_entropy(transforms::Measure{transforms::Semicircular{0.0, 1.0}});
  check("semicircular entropy value",
        std::abs(chi_sc - 0.5 * std::log(2.0 * M_PI * std::exp(1.0))) < 1e-4);
  auto fi = info::fisher_information(transforms::moments_of(transforms::Semicircular{0.0, 1.0}, 8),
                                     4);
  check("semicircular Fisher value", std::abs(fi.phi - 1.0) < 1e-10);
  // density mass
  auto rec = transforms::density_from_cumulants(
      to_d(moments::semicircular_cumulants<Rational>(Rational(0), Rational(1), 16)).k, 1000);
  check("density recovery mass", rec.mass_delta < 1e-3);
  std::printf("%d failure(s)\n", failures);
  return failures ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"free-probability toolkit"};
  app.set_config("--config");
  Options opt;
  app.add_option("--dist", opt.dist,
                 "distribution: semicircular(mean,var) | bernoulli | uniform(a,b) | atomic(file)");
  app.add_option("--smooth", opt.smooth, "free-convolve with Semicircular(0,t)");
  app.add_option("--mode", opt.mode, "exact | float")
      ->check(CLI::IsMember({"exact", "float"}));
  app.add_option("--order", opt.order, "cumulant/moment truncation order");
  app.add_option("--format", opt.format, "json | csv | table")
      ->check(CLI::IsMember({"json", "csv", "table"}));
  app.add_option("--output", opt.output, "output path (default stdout)");
  app.add_option("--threads", opt.threads, "worker cap (modules are sequential)");

  int m = 1, n = 2, degree = 4, grid = 2000, nmax = 6, rmt_N = 256, rmt_T = 10, letters = 2;
  std::uint64_t seed = 1;
  std::string with = "semicircular", poly_file;
  std::vector<int> subset;

  auto* c_cum = app.add_subcommand("cumulants", "free cumulants of the distribution");
  auto* c_mom = app.add_subcommand("moments", "moments of the distribution");
  auto* c_conv = app.add_subcommand("convolve", "free additive convolution");
  c_conv->add_option("--with", with, "second distribution");
  auto* c_dens = app.add_subcommand("density", "recover the spectral density");
  c_dens->add_option("--grid", grid, "grid cells");
  auto* c_proj = app.add_subcommand("project", "conditional expectation of a polynomial");
  auto* c_es = app.add_subcommand("efron-stein", "Efron-Stein component of a polynomial");
  for (auto* c : {c_proj, c_es}) {
    c->add_option("--poly", poly_file, "polynomial JSON [{word, coeff}]")->required();
    c->add_option("--subset,-I", subset, "letter subset");
    c->add_option("--letters", letters, "number of letters");
    c->add_option("--degree", degree, "projection degree cap");
  }
  auto* c_mc = app.add_subcommand("maxcorr", "maximal correlation of s_m and s_n");
  c_mc->add_option("--m", m, "m");
  c_mc->add_option("--n", n, "n");
  c_mc->add_option("--degree", degree, "polynomial degree D");
  auto* c_ent = app.add_subcommand("entropy", "free entropy chi");
  c_ent->add_option("--grid", grid, "grid cells");
  auto* c_fis = app.add_subcommand("fisher", "free Fisher information Phi");
  c_fis->add_option("--degree", degree, "conjugate-variable degree D");
  auto* c_mono = app.add_subcommand("monotonicity", "free CLT monotonicity report");
  c_mono->add_option("--nmax", nmax, "largest n");
  c_mono->add_option("--degree", degree, "Fisher degree D");
  c_mono->add_option("--grid", grid, "grid cells");
  auto* c_rmt = app.add_subcommand("rmt-check", "random-matrix cross-validation");
  c_rmt->add_option("--size", rmt_N, "matrix size N");
  c_rmt->add_option("--trials", rmt_T, "trials T");
  c_rmt->add_option("--seed", seed, "PRNG seed");
  auto* c_ver = app.add_subcommand("verify", "run the invariant suite");
  app.require_subcommand(1);
  for (auto* c : app.get_subcommands({})) c->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 64;
  }

  try {
    if (c_cum->parsed()) return cmd_sequence(opt, false);
    if (c_mom->parsed()) return cmd_sequence(opt, true);
    if (c_conv->parsed()) return cmd_convolve(opt, with);
    if (c_dens->parsed()) return cmd_density(opt, grid);
    if (c_proj->parsed()) return cmd_project(opt, poly_file, subset, letters, degree, false);
    if (c_es->parsed()) return cmd_project(opt, poly_file, subset, letters, degree, true);
    if (c_mc->parsed()) return cmd_maxcorr(opt, m, n, degree);
    if (c_ent->parsed()) return cmd_entropy(opt, grid);
    if (c_fis->parsed()) return cmd_fisher(opt, degree);
    if (c_mono->parsed()) return cmd_monotonicity(opt, nmax, degree, grid);
    if (c_rmt->parsed()) return cmd_rmt_check(opt, rmt_N, rmt_T, seed);
    if (c_ver->parsed()) return cmd_verify(opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 64;
}
