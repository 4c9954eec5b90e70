// Command-line entry point: barcode, entropy, crofton, toric and verify.
// Exit codes: 0 success, 1 error, 2 a certificate or criterion failed.
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "hbar/acceptance.hpp"
#include "hbar/growth.hpp"
#include "hbar/io.hpp"
#include "json.hpp"

using namespace hbar;
using ojson = nlohmann::ordered_json;

namespace {

constexpr int kOk = 0, kError = 1, kCertificateFailed = 2;

struct RunConfig {
  std::uint64_t seed = 1;
  std::string out;
  std::string eps_grid;
  int k_max = 0;
  double s_max = 0;
  std::size_t samples = 0;
  std::string input, target, suite;
  int degree = -1;
  bool formula = false;
};

/// Output files are collected first and written only after every step succeeded.
using Files = std::map<std::string, std::string>;

std::string out_dir(const RunConfig& cfg) {
  if (!cfg.out.empty()) return cfg.out;
  if (const char* env = std::getenv("HBAR_OUT_DIR"); env && *env) return env;
  return "hbar_out";
}

void write_all(const RunConfig& cfg, const Files& files) {
  const std::string dir = out_dir(cfg);
  for (const auto& [name, text] : files) write_file((std::filesystem::path(dir) / name).string(), text);
  std::printf("wrote %zu file(s) to %s\n", files.size(), dir.c_str());
}

std::vector<double> parse_grid(const std::string& text, std::vector<double> fallback) {
  if (text.empty()) return fallback;
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(fmt::format("--eps-grid: cannot parse \"{}\"", item));
    }
    if (!(out.back() > 0)) throw Error("--eps-grid: values must be positive");
  }
  if (out.empty()) throw Error("--eps-grid: empty grid");
  return out;
}

std::uint64_t substream(const RunConfig& cfg, std::string_view name) { return Rng(cfg.seed, name).next(); }

ojson fit_json(const RateFit& f) {
  return {{"value", f.value}, {"window", {f.lo, f.hi}}, {"points", f.points}, {"residual", f.residual},
          {"warnings", f.warnings}};
}

int cmd_barcode(const RunConfig& cfg) {
  const auto input = complex_from_json(read_file(cfg.input));
  const auto eps = parse_grid(cfg.eps_grid, {0.5, 1.0});
  Files files;
  std::string table = "eps,count\n";
  if (const auto* f2 = std::get_if<FilteredComplexF2>(&input)) {
    const Barcode b = reduce_filtered_complex(*f2).barcode;
    files["barcode.csv"] = barcode_to_csv(b);
    files["barcode.json"] = barcode_to_json(b);
    for (double e : eps) table += fmt::format("{},{}\n", format_real(e), barcode_function(b, e));
    std::printf("%zu bar(s), beta_max %s\n", b.total(), format_real(beta_max(b)).c_str());
    for (const auto& bar : b.bars())
      std::printf("  (%s, %s] x%zu\n", format_real(bar.start).c_str(), format_real(bar.end).c_str(), bar.multiplicity);
  } else {
    const auto b = unpinned_barcode(std::get<NovikovComplex>(input));
    files["barcode.csv"] = unpinned_to_csv(b);
    ojson j = {{"lengths", b.lengths}, {"infinite", b.infinite}};
    files["barcode.json"] = j.dump(2) + "\n";
    for (double e : eps) table += fmt::format("{},{}\n", format_real(e), b_eps_unpinned(b, e));
    const double beta = b.lengths.empty() ? 0.0 : b.lengths.back();
    std::printf("%zu finite bar(s), %zu infinite, beta_max %s\n", b.lengths.size(), b.infinite, format_real(beta).c_str());
  }
  files["b_eps.csv"] = table;
  write_all(cfg, files);
  return kOk;
}

int entropy_from_system(const RunConfig& cfg, const DynamicalSystem& sys) {
  std::vector<double> eps{std::ldexp(1.0, -6), std::ldexp(1.0, -8), std::ldexp(1.0, -10)};
  int k_max = 8;
  std::size_t budget = 1 << 22;
  switch (sys.kind()) {
    case SystemKind::LinearTorus: eps = {0.25, 0.125, 0.0625}, k_max = 7; break;
    case SystemKind::Shift: eps = {0.25, 0.125}; break;
    case SystemKind::Rotation: k_max = 16, budget = 100000; break;
    default: break;
  }
  eps = parse_grid(cfg.eps_grid, eps);
  if (cfg.k_max > 0) k_max = cfg.k_max;
  if (cfg.samples > 0) budget = cfg.samples;
  const auto est = htop_estimate(sys, eps, 1, k_max, budget, substream(cfg, "entropy.htop"));
  ojson j;
  j["system"] = sys.name();
  j["value"] = est.value;
  j["per_eps"] = ojson::array();
  std::string rates = "eps,rate\n", counts = "eps,k,log2_separated,log2_cover\n";
  for (const auto& r : est.per_eps) {
    j["per_eps"].push_back({{"eps", r.eps}, {"rate", fit_json(r.fit)}, {"separated", r.separated},
                            {"cover", r.cover}, {"bracket_ok", r.bracket_ok}});
    rates += fmt::format("{},{}\n", format_real(r.eps), format_real(r.fit.value));
    for (std::size_t i = 0; i < r.separated.size(); ++i)
      counts += fmt::format("{},{},{},{}\n", format_real(r.eps), est.k_min + static_cast<int>(i),
                            format_real(std::log2(r.separated[i])), format_real(std::log2(r.cover[i])));
  }
  j["k_range"] = {est.k_min, est.k_max};
  j["partial"] = est.partial;
  j["diagnostics"] = est.diagnostics;
  write_all(cfg, {{"entropy.json", j.dump(2) + "\n"}, {"rates.csv", rates}, {"counts.csv", counts}});
  std::printf("%s: h_top estimate %.4f (base 2)%s\n", sys.name().c_str(), est.value, est.partial ? " [partial]" : "");
  for (const auto& d : est.diagnostics) std::printf("  note: %s\n", d.c_str());
  return kOk;
}

int entropy_from_barcodes(const RunConfig& cfg) {
  std::vector<std::pair<double, std::string>> entries;
  for (const auto& f : std::filesystem::directory_iterator(cfg.input)) {
    if (f.path().extension() != ".csv") continue;
    const std::string stem = f.path().stem().string();
    std::size_t used = 0;
    double index = 0;
    try {
      index = std::stod(stem, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != stem.size()) throw Error(fmt::format("{}: barcode files must be named by their index", f.path().string()));
    entries.emplace_back(index, f.path().string());
  }
  std::sort(entries.begin(), entries.end());
  std::vector<double> index;
  std::vector<Barcode> family;
  for (const auto& [i, path] : entries) {
    index.push_back(i);
    try {
      family.push_back(barcode_from_csv(read_file(path)));
    } catch (const Error& e) {
      throw Error(fmt::format("{}: {}", path, e.what()));
    }
  }
  const auto est = barcode_entropy_estimate(index, family, parse_grid(cfg.eps_grid, {1.0, 0.5}));
  ojson j;
  ojson rates = ojson::object();
  std::string csv = "eps,rate\n";
  for (std::size_t e = 0; e < est.eps.size(); ++e) {
    rates[format_real(est.eps[e])] = est.rates[e].value;
    csv += fmt::format("{},{}\n", format_real(est.eps[e]), format_real(est.rates[e].value));
  }
  j["eps"] = rates;
  j["value"] = est.value;
  j["monotone"] = est.monotone;
  j["convention"] = est.convention;
  write_all(cfg, {{"entropy.json", j.dump(2) + "\n"}, {"rates.csv", csv}});
  std::printf("barcode entropy estimate %.4f over %zu barcodes\n", est.value, family.size());
  return kOk;
}

int cmd_entropy(const RunConfig& cfg) {
  if (std::filesystem::is_directory(cfg.input)) return entropy_from_barcodes(cfg);
  if (std::filesystem::path(cfg.input).extension() == ".csv") {
    const auto s = growth_from_csv(read_file(cfg.input));
    const auto fit = exp_growth_rate(s);
    ojson j = {{"value", fit.value}, {"fit", fit_json(fit)}};
    write_all(cfg, {{"entropy.json", j.dump(2) + "\n"}});
    std::printf("exponential growth rate %.4f (base 2)\n", fit.value);
    return kOk;
  }
  return entropy_from_system(cfg, system_from_json(read_file(cfg.input)));
}

int cmd_crofton(const RunConfig& cfg) {
  const auto t = tomograph_from_json(read_file(cfg.input));
  const auto target = polyline_from_csv(read_file(cfg.target));
  const std::size_t samples = cfg.samples > 0 ? cfg.samples : 200000;
  const auto r = crofton_mc(t, target, samples, substream(cfg, "crofton.mc"));
  ojson j = {{"tomograph", t.name}, {"integral", r.integral}, {"stderr", r.std_error}, {"const", r.constant},
             {"volume", r.volume}, {"samples", r.samples}, {"rejected", r.rejected}, {"pass", r.pass}};
  if (cfg.formula) {
    const auto f = crofton_formula_check(t, target, samples, 64, substream(cfg, "crofton.formula"));
    j["formula"] = {{"mc", f.mc}, {"mc_stderr", f.mc_stderr}, {"density", f.density},
                    {"density_stderr", f.density_stderr}, {"z", f.z}, {"pass", f.pass}};
  }
  write_all(cfg, {{"crofton.json", j.dump(2) + "\n"}});
  std::printf("integral %.6f +- %.6f, bound %.6f x %.6f: %s\n", r.integral, r.std_error, r.constant, r.volume,
              r.pass ? "pass" : "FAIL");
  const bool formula_ok = !cfg.formula || j["formula"]["pass"].get<bool>();
  return r.pass && formula_ok ? kOk : kCertificateFailed;
}

std::vector<double> s_grid(double s_max) {
  if (!(s_max > 0)) throw Error("--s-max must be positive");
  std::vector<double> g;
  for (int i = 1; i <= 1000; ++i) g.push_back(s_max * i / 1000);
  return g;
}

int certify(const RunConfig& cfg, Files files, const GrowthSeries& s, int degree, ojson j, const char* index_name) {
  const auto cert = toric_bound_check(s, degree);
  j["certificate"] = {{"degree", cert.degree}, {"c_n", cert.c_n}, {"c_0", cert.c_0}, {"pass", cert.pass},
                      {"worst_ratio", cert.worst_ratio}, {"violations", cert.violations}};
  files["series.csv"] = growth_to_csv(s, index_name);
  files["toric.json"] = j.dump(2) + "\n";
  write_all(cfg, files);
  std::printf("degree-%d certificate: %s (C_n %.4f, C_0 %.4f)\n", degree, cert.pass ? "pass" : "FAIL", cert.c_n, cert.c_0);
  return cert.pass ? kOk : kCertificateFailed;
}

int cmd_toric(const RunConfig& cfg) {
  if (std::filesystem::path(cfg.input).extension() == ".csv") {
    const auto s = growth_from_csv(read_file(cfg.input));
    return certify(cfg, {}, s, cfg.degree >= 0 ? cfg.degree : 1, ojson{{"model", "series"}}, "k");
  }
  const auto model = toric_model_from_json(read_file(cfg.input));
  if (const auto* h = std::get_if<ConvexProfile>(&model)) {
    const int k_max = cfg.k_max > 0 ? cfg.k_max : 100;
    GrowthSeries s;
    for (int k = 1; k <= k_max; ++k) {
      s.index.push_back(k);
      s.counts.push_back(static_cast<double>(rational_tori_count(*h, k).total));
    }
    const auto last = rational_tori_count(*h, k_max);
    ojson faces = ojson::array();
    for (const auto& f : last.faces)
      faces.push_back({{"face", f.face}, {"dim", f.dim}, {"count", f.count}, {"closed", f.closed}});
    ojson j = {{"model", h->name}, {"k_max", k_max}, {"faces_at_k_max", faces},
               {"fixed_point_bound_at_k_max", fixed_point_bound(*h, k_max)}};
    return certify(cfg, {}, s, cfg.degree >= 0 ? cfg.degree : h->dim, j, "k");
  }
  const double s_max = cfg.s_max > 0 ? cfg.s_max : 1000;
  const auto grid = s_grid(s_max);
  if (const auto* e = std::get_if<EllipsoidSpec>(&model)) {
    const auto s = ellipsoid_counts(*e, grid);
    GrowthSeries tail;
    for (std::size_t i = 0; i < s.size(); ++i)
      if (s.index[i] >= s_max / 10) tail.index.push_back(s.index[i]), tail.counts.push_back(s.counts[i]);
    const auto fit = linear_fit(tail);
    Barcode b;
    for (double a : ellipsoid_spectrum(*e, s_max).actions) b.add(a, kInf);
    ojson j = {{"model", "ellipsoid"}, {"a", e->a}, {"rationally_independent", e->rationally_independent()},
               {"s_max", s_max}, {"generators", b.total()}, {"slope", fit_json(fit)}};
    std::printf("ellipsoid: %zu generators below %s, slope %.4f\n", b.total(), format_real(s_max).c_str(), fit.value);
    return certify(cfg, {{"barcode.csv", barcode_to_csv(b)}}, s, cfg.degree >= 0 ? cfg.degree : 1, j, "s");
  }
  const auto& lattice = std::get<LatticeBasis>(model);
  const auto s = flat_torus_counts(lattice, grid);
  const auto b = flat_torus_loop_barcode(lattice, s_max);
  ojson j = {{"model", "flat_torus"}, {"s_max", s_max}, {"bars", b.total()}};
  std::printf("flat torus: %zu bars below %s\n", b.total(), format_real(s_max).c_str());
  return certify(cfg, {{"barcode.csv", barcode_to_csv(b)}}, s, cfg.degree >= 0 ? cfg.degree : 1, j, "s");
}

int cmd_verify(const RunConfig& cfg) {
  const auto ids = suite_criteria(cfg.suite);
  SuiteOptions opt;
  opt.seed = cfg.seed;
  opt.on_result = [](const CriterionResult& r) {
    std::printf("%s\n", result_line(r).c_str());
    std::fflush(stdout);
  };
  const auto results = run_suite(ids, opt);
  std::size_t failed = 0;
  for (const auto& r : results) failed += !r.pass;
  write_all(cfg, {{"verify.json", suite_report_json(results)}});
  std::printf("%zu/%zu criteria passed\n", results.size() - failed, results.size());
  return failed == 0 ? kOk : kCertificateFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Barcode growth, entropy and Crofton toolkit"};
  app.require_subcommand(1);
  RunConfig cfg;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", cfg.seed, "Random seed; fixes every output byte");
    sub->add_option("--out", cfg.out, "Output directory (default: $HBAR_OUT_DIR or ./hbar_out)");
  };
  auto* barcode = app.add_subcommand("barcode", "Reduce a filtered complex (JSON) and write its barcode");
  barcode->add_option("complex", cfg.input, "Complex JSON file")->required();
  barcode->add_option("--eps-grid", cfg.eps_grid, "Comma-separated eps values for the b_eps table");
  common(barcode);

  auto* entropy = app.add_subcommand("entropy", "Estimate h_top of a system, or barcode entropy of a directory");
  entropy->add_option("input", cfg.input, "System spec JSON, growth CSV, or directory of <index>.csv barcodes")->required();
  entropy->add_option("--eps-grid", cfg.eps_grid, "Comma-separated eps values");
  entropy->add_option("--k-max", cfg.k_max, "Largest iterate k");
  entropy->add_option("--samples", cfg.samples, "Candidate budget per packing");
  common(entropy);

  auto* crofton = app.add_subcommand("crofton", "Monte Carlo Crofton integral of a tomograph against a curve");
  crofton->add_option("tomograph", cfg.input, "Tomograph spec JSON")->required();
  crofton->add_option("target", cfg.target, "Target polyline CSV (x,y)")->required();
  crofton->add_option("--samples", cfg.samples, "Monte Carlo samples (default 200000)");
  crofton->add_flag("--formula", cfg.formula, "Also compare with the push-forward density integral");
  common(crofton);

  auto* toric = app.add_subcommand("toric", "Growth series and degree certificate of a toric model");
  toric->add_option("model", cfg.input, "Profile / ellipsoid / flat torus JSON, or growth CSV")->required();
  toric->add_option("--k-max", cfg.k_max, "Largest level k for profiles (default 100)");
  toric->add_option("--s-max", cfg.s_max, "Largest action for ellipsoids and flat tori (default 1000)");
  toric->add_option("--degree", cfg.degree, "Certificate degree (default: model dimension)");
  common(toric);

  auto* verify = app.add_subcommand("verify", "Run acceptance criteria");
  verify->add_option("suite", cfg.suite, "all, fast, or a criterion number")->required();
  common(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kError;
  }
  try {
    if (*barcode) return cmd_barcode(cfg);
    if (*entropy) return cmd_entropy(cfg);
    if (*crofton) return cmd_crofton(cfg);
    if (*toric) return cmd_toric(cfg);
    return cmd_verify(cfg);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kError;
  }
}
