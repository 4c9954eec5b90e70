#include "hbar/acceptance.hpp"

#include <fmt/format.h>
#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>

#include "hbar/bottleneck.hpp"
#include "hbar/dynamics.hpp"
#include "hbar/growth.hpp"
#include "hbar/instances.hpp"
#include "hbar/integral_geometry.hpp"
#include "hbar/novikov.hpp"
#include "hbar/sampled_module.hpp"
#include "hbar/toric.hpp"
#include "json.hpp"

namespace hbar {

namespace {

const Mat2 kCat{{{2, 1}, {1, 1}}};
const double kCatLambda = (3 + std::sqrt(5.0)) / 2;
const double kCatRate = std::log2(kCatLambda);
const double kGolden = 0.6180339887498949;

struct Outcome {
  bool pass = false;
  std::string detail;
};

/// Entropy estimates shared between the dynamics criteria.
struct Context {
  std::uint64_t seed;
  Exec exec;
  std::map<std::string, EntropyEstimate> htop;

  std::uint64_t sub(std::string_view name) const { return Rng(seed, name).next(); }

  const EntropyEstimate& doubling() {
    return cached("doubling", [&] {
      return htop_estimate(DynamicalSystem::circle_degree(2), {std::ldexp(1.0, -6), std::ldexp(1.0, -8), std::ldexp(1.0, -10)},
                           1, 8, 1 << 22, sub("verify.htop.doubling"), exec);
    });
  }
  const EntropyEstimate& cat() {
    return cached("cat", [&] {
      return htop_estimate(DynamicalSystem::linear_torus(kCat), {0.25, 0.125, 0.0625}, 1, 7, 1 << 22,
                           sub("verify.htop.cat"), exec);
    });
  }
  const EntropyEstimate& rotation() {
    return cached("rotation", [&] {
      return htop_estimate(DynamicalSystem::rotation(kGolden), {std::ldexp(1.0, -6), std::ldexp(1.0, -8), std::ldexp(1.0, -10)},
                           1, 16, 100000, sub("verify.htop.rotation"), exec);
    });
  }
  const EntropyEstimate& custom() {
    return cached("custom", [&] {
      return htop_estimate(custom_system(), {std::ldexp(1.0, -6), std::ldexp(1.0, -8)}, 1, 8, 1 << 20,
                           sub("verify.htop.custom"), exec);
    });
  }
  static DynamicalSystem custom_system() { return DynamicalSystem::custom_circle(2, {0.0, 0.1, 0.0, -0.1}); }

 private:
  template <class F>
  const EntropyEstimate& cached(const std::string& key, F make) {
    auto it = htop.find(key);
    if (it == htop.end()) it = htop.emplace(key, make()).first;
    return it->second;
  }
};

std::string fixed(double x, int digits = 4) { return fmt::format("{:.{}f}", x, digits); }

Barcode rank_formula_barcode(const FilteredComplexF2& c) {
  std::vector<double> actions;
  for (const auto& g : c.generators()) actions.push_back(g.action);
  return barcode_from_multiplicities(sample_module(c), actions);
}

/// Bar lengths of a ⊗ b: each pair of finite bars gives two bars of the
/// shorter length; a finite bar against an infinite one keeps its length.
UnpinnedBarcode tensor_pairing_law(const UnpinnedBarcode& a, const UnpinnedBarcode& b) {
  UnpinnedBarcode out;
  for (double x : a.lengths) {
    for (double y : b.lengths) out.lengths.insert(out.lengths.end(), 2, std::min(x, y));
    out.lengths.insert(out.lengths.end(), b.infinite, x);
  }
  for (double y : b.lengths) out.lengths.insert(out.lengths.end(), a.infinite, y);
  out.infinite = a.infinite * b.infinite;
  std::sort(out.lengths.begin(), out.lengths.end());
  return out;
}

bool parallel(const Context& ctx) { return ctx.exec == Exec::Parallel; }

Outcome c1_sphere(Context&) {
  const auto b = reduce_filtered_complex(sphere_morse_complex()).barcode;
  Barcode expect;
  expect.add(0, kInf);
  expect.add(1, 2);
  expect.add(3, kInf);
  std::string bars;
  for (const auto& x : b.bars()) bars += fmt::format("({},{}]", format_real(x.start), format_real(x.end));
  return {b.same_intervals(expect), "bars " + bars};
}

Outcome c2_oracle(Context& ctx) {
  const auto family = tetrahedron_subcomplexes(12);
  std::size_t checked = 0, mismatches = 0;
  for (const auto& k : family)
    for (int f = 0; f < 81; ++f) {
      const std::vector<double> values{double(f % 3), double(f / 3 % 3), double(f / 9 % 3), double(f / 27 % 3)};
      const auto c = sublevel_filtration(k, values);
      mismatches += !rank_formula_barcode(c).same_intervals(reduce_filtered_complex(c).barcode);
      ++checked;
    }
  const int trials = 500;
  std::size_t random_mismatches = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : random_mismatches) if (parallel(ctx))
  for (int t = 0; t < trials; ++t) {
    Rng rng(ctx.seed, "verify.c2", static_cast<std::uint64_t>(t));
    const auto c = random_filtered_complex(rng, 6, 30);
    random_mismatches += !rank_formula_barcode(c).same_intervals(reduce_filtered_complex(c).barcode);
  }
  return {mismatches == 0 && random_mismatches == 0,
          fmt::format("structured {} complexes, {} mismatches; random {} complexes, {} mismatches", checked,
                      mismatches, trials, random_mismatches)};
}

Outcome c3_isolated(Context& ctx) {
  const int trials = 200;
  std::size_t violations = 0, max_p = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : violations) reduction(max : max_p) if (parallel(ctx))
  for (int t = 0; t < trials; ++t) {
    Rng rng(ctx.seed, "verify.c3", static_cast<std::uint64_t>(t));
    const std::size_t planted = 1 + rng.below(20);
    const std::size_t n = planted + rng.below(11);
    const double eps = 1.0;
    const auto p = random_novikov_complex(rng, {n, 2 * n, planted, eps});
    const auto iso = isolated_vertices(floer_graph(p.complex), eps);
    bool ok = true;
    for (auto v : p.planted) ok = ok && std::find(iso.begin(), iso.end(), v) != iso.end();
    ok = ok && 2 * b_eps_unpinned(unpinned_barcode(p.complex), eps) >= iso.size();
    violations += !ok;
    max_p = std::max(max_p, iso.size());
  }
  return {violations == 0, fmt::format("{} complexes, isolated sets up to {}, {} violations", trials, max_p, violations)};
}

Outcome c4_stability(Context& ctx) {
  const int trials = 1000;
  const double delta = 0.2;
  std::size_t violations = 0;
  double worst = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : violations) reduction(max : worst) if (parallel(ctx))
  for (int t = 0; t < trials; ++t) {
    Rng rng(ctx.seed, "verify.c4", static_cast<std::uint64_t>(t));
    const auto c = random_filtered_complex(rng, 5, 20);
    const auto p = perturb_actions(c, delta / 2, rng.next());
    const double shift = max_action_shift(c, p);
    const auto bc = reduce_filtered_complex(c).barcode, bp = reduce_filtered_complex(p).barcode;
    const double d = bottleneck_distance(bc, bp);
    bool ok = shift <= delta / 2 && d <= shift;
    for (double eps : {0.25, 0.5, 1.0, 2.0})
      ok = ok && barcode_function(bc, eps + delta) <= barcode_function(bp, eps) &&
           barcode_function(bp, eps) <= barcode_function(bc, eps - delta);
    violations += !ok;
    worst = std::max(worst, shift > 0 ? d / shift : 0.0);
  }
  return {violations == 0, fmt::format("{} complexes, delta {}, max bottleneck/shift {}, {} violations", trials,
                                       format_real(delta), fixed(worst), violations)};
}

Outcome c5_duality_tensor(Context& ctx) {
  const int trials = 500;
  std::size_t dual_bad = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : dual_bad) if (parallel(ctx))
  for (int t = 0; t < trials; ++t) {
    Rng rng(ctx.seed, "verify.c5.dual", static_cast<std::uint64_t>(t));
    const auto c = random_novikov_complex(rng, {2 + rng.below(11), 30, 0, 1.0}).complex;
    const auto b = unpinned_barcode(c);
    bool ok = true;
    for (double eps : {0.25, 0.5, 1.0, 2.0, 4.0})
      ok = ok && b_eps_unpinned(unpinned_barcode(dual_complex(c)), eps) == b_eps_unpinned(b, eps);
    dual_bad += !ok;
  }
  // Every standard complex with at most 6 generators and lengths in {1, 2, 3}.
  std::vector<std::pair<std::vector<double>, std::size_t>> shapes;
  for (std::size_t f = 0; f <= 3; ++f) {
    std::vector<std::vector<double>> multisets{{}};
    for (std::size_t i = 0; i < f; ++i) {
      std::vector<std::vector<double>> next;
      for (const auto& m : multisets)
        for (double x : {1.0, 2.0, 3.0})
          if (m.empty() || x >= m.back()) {
            next.push_back(m);
            next.back().push_back(x);
          }
      multisets = std::move(next);
    }
    for (const auto& m : multisets)
      for (std::size_t inf = 0; 2 * f + inf <= 6; ++inf) shapes.emplace_back(m, inf);
  }
  std::size_t law_bad = 0;
  const long ns = static_cast<long>(shapes.size());
#pragma omp parallel for schedule(dynamic) reduction(+ : law_bad) if (parallel(ctx))
  for (long i = 0; i < ns * ns; ++i) {
    const auto& [la, ia] = shapes[i / ns];
    const auto& [lb, ib] = shapes[i % ns];
    const auto a = standard_complex(la, ia), b = standard_complex(lb, ib);
    law_bad += !(unpinned_barcode(tensor_product(a, b)) == tensor_pairing_law(unpinned_barcode(a), unpinned_barcode(b)));
  }
  const int pairs = 200;
  std::size_t ineq_bad = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : ineq_bad) if (parallel(ctx))
  for (int t = 0; t < pairs; ++t) {
    Rng rng(ctx.seed, "verify.c5.tensor", static_cast<std::uint64_t>(t));
    const auto a = random_novikov_complex(rng, {2 + rng.below(5), 14, 0, 1.0}).complex;
    const auto b = random_novikov_complex(rng, {2 + rng.below(5), 14, 0, 1.0}).complex;
    const auto ba = unpinned_barcode(a), bb = unpinned_barcode(b), bt = unpinned_barcode(tensor_product(a, b));
    bool ok = true;
    for (double eps : {0.25, 0.5, 1.0, 2.0})
      ok = ok && b_eps_unpinned(bt, eps) <= 2 * b_eps_unpinned(ba, eps) * b_eps_unpinned(bb, eps);
    ineq_bad += !ok;
  }
  return {dual_bad == 0 && law_bad == 0 && ineq_bad == 0,
          fmt::format("dual {} complexes, {} bad; pairing law {} instances, {} bad; product bound {} pairs, {} bad",
                      trials, dual_bad, shapes.size() * shapes.size(), law_bad, pairs, ineq_bad)};
}

std::string entropy_detail(const EntropyEstimate& e) {
  std::string per;
  for (const auto& r : e.per_eps) per += fmt::format(" eps={}:{}", format_real(r.eps), fixed(r.fit.value));
  return fmt::format("value {} (k {}..{},{})", fixed(e.value), e.k_min, e.k_max, per);
}

Outcome c6_doubling(Context& ctx) {
  const auto& e = ctx.doubling();
  return {e.value >= 0.9 && e.value <= 1.1, entropy_detail(e) + ", target [0.9, 1.1]"};
}

Outcome c7_cat(Context& ctx) {
  const auto& e = ctx.cat();
  const bool htop_ok = std::abs(e.value - kCatRate) <= 0.1 * kCatRate;
  GrowthSeries per;
  bool exact = true;
  for (int k = 1; k <= 20; ++k) {
    const auto n = linear_periodic_count(kCat, k);
    // |det(A^k − I)| = λ^k + λ^−k − 2 for the cat map.
    exact = exact && static_cast<double>(n) == std::round(std::pow(kCatLambda, k) + std::pow(kCatLambda, -k) - 2);
    per.index.push_back(k);
    per.counts.push_back(static_cast<double>(n));
  }
  const double rate = orbit_growth_entropy(per);
  const bool per_ok = exact && std::abs(rate - kCatRate) <= 0.01 * kCatRate;
  return {htop_ok && per_ok, fmt::format("h_top {}; periodic rate {} at k=20 (exact counts {}); target {}",
                                         entropy_detail(e), fixed(rate), exact ? "match" : "differ", fixed(kCatRate))};
}

Outcome c8_rotation(Context& ctx) {
  const auto& e = ctx.rotation();
  return {e.value <= 0.05, entropy_detail(e) + ", target <= 0.05"};
}

Outcome c9_yomdin(Context& ctx) {
  const double slack = 0.15;
  struct Row {
    std::string name;
    double vol, htop;
  };
  std::vector<Row> rows;
  rows.push_back({"doubling graph", graph_volume_growth(DynamicalSystem::circle_degree(2), 12).fit.value,
                  ctx.doubling().value});
  rows.push_back({"custom graph", graph_volume_growth(Context::custom_system(), 10).fit.value, ctx.custom().value});
  rows.push_back({"rotation segment",
                  volume_growth(DynamicalSystem::rotation(kGolden), {{0.0, 0.0}, {0.5, 0.0}}, 12).fit.value,
                  ctx.rotation().value});
  const auto cat = DynamicalSystem::linear_torus(kCat);
  rows.push_back({"cat segment", volume_growth(cat, {{0.0, 0.0}, {0.1, 0.03}}, 12).fit.value, ctx.cat().value});
  const double unstable = volume_growth(cat, {{0.0, 0.0}, {0.1, 0.1 * (kCatLambda - 2)}}, 12).fit.value;
  rows.push_back({"cat unstable", unstable, ctx.cat().value});
  bool ok = std::abs(unstable - kCatRate) <= 0.1 * kCatRate;
  std::string detail;
  for (const auto& r : rows) {
    ok = ok && r.vol <= r.htop + slack;
    detail += fmt::format("{} {} <= {}; ", r.name, fixed(r.vol), fixed(r.htop + slack));
  }
  detail += fmt::format("cat unstable vs {}; shift has no volume", fixed(kCatRate));
  return {ok, detail};
}

Outcome c10_shadowing(Context& ctx) {
  const auto sys = DynamicalSystem::linear_torus(kCat);
  const double eta = 1e-4;
  const int trials = 100;
  std::size_t bad = 0;
  double worst_dist = 0, worst_defect = 0, worst_pseudo = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : bad) reduction(max : worst_dist, worst_defect, worst_pseudo) if (parallel(ctx))
  for (int t = 0; t < trials; ++t) {
    Rng rng(ctx.seed, "verify.c10", static_cast<std::uint64_t>(t));
    const int k = 1 + static_cast<int>(rng.below(50));
    auto z = exact_periodic_orbit(kCat, k, {static_cast<std::int64_t>(rng.below(1000)), static_cast<std::int64_t>(rng.below(1000))});
    for (auto& p : z) {
      const double r = 0.25 * eta * std::sqrt(rng.uniform()), th = 2 * M_PI * rng.uniform();
      p.x = {p.x[0] + r * std::cos(th), p.x[1] + r * std::sin(th)};
      for (auto& c : p.x) c -= std::floor(c);
    }
    const double pseudo = pseudo_orbit_defect(sys, z);
    const auto sh = shadow_linear(kCat, z);
    const double defect = pseudo_orbit_defect(sys, sh.orbit);
    bad += !(pseudo < eta && sh.distance <= 5 * eta && defect <= 1e-10);
    worst_dist = std::max(worst_dist, sh.distance / eta);
    worst_defect = std::max(worst_defect, defect);
    worst_pseudo = std::max(worst_pseudo, pseudo / eta);
  }
  return {bad == 0, fmt::format("{} pseudo-orbits, max defect/eta {}, max distance/eta {}, max residual {:.2e}, {} bad",
                                trials, fixed(worst_pseudo), fixed(worst_dist), worst_defect, bad)};
}

Outcome c11_crofton(Context& ctx) {
  const auto lines = line_tomograph(2.0);
  const std::size_t samples = 1000000;
  struct Target {
    std::string name;
    Polyline curve;
  };
  const std::vector<Target> targets{{"segment", {{-0.5, 0.1}, {0.5, 0.1}}}, {"circle", regular_polygon({0, 0}, 1.0, 720)}};
  bool ok = true;
  std::string detail;
  for (const auto& t : targets) {
    const auto r = crofton_mc(lines, t.curve, samples, ctx.sub("verify.c11.mc." + t.name), ctx.exec);
    const double expect = 2 * polyline_length(t.curve);
    const double rel = std::abs(r.integral - expect) / expect;
    const auto f = crofton_formula_check(lines, t.curve, samples, 64, ctx.sub("verify.c11.formula." + t.name), ctx.exec);
    ok = ok && rel <= 0.02 && r.pass && f.z <= 3;
    detail += fmt::format("{}: integral {} vs 2L {} ({}%), constant {}, inequality {}, formula z {}; ", t.name,
                          fixed(r.integral), fixed(expect), fixed(100 * rel, 2), fixed(r.constant, 3),
                          r.pass ? "pass" : "FAIL", fixed(f.z, 2));
  }
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

Outcome c12_ellipsoid(Context&) {
  const EllipsoidSpec e{{1.0, std::sqrt(2.0)}};
  const std::size_t at10 = ellipsoid_spectrum(e, 10).generator_count;
  std::vector<double> grid;
  for (int s = 100; s <= 1000; ++s) grid.push_back(s);
  const double slope = linear_fit(ellipsoid_counts(e, grid)).value;
  const double expect = 1 + 1 / std::sqrt(2.0);
  std::vector<double> index;
  std::vector<Barcode> family;
  for (int s = 100; s <= 1000; s += 10) {
    index.push_back(s);
    Barcode b;
    for (double a : ellipsoid_spectrum(e, s).actions) b.add(a, kInf);
    family.push_back(std::move(b));
  }
  const double hbar = barcode_entropy_estimate(index, family, {1.0, 0.1}).value;
  const bool ok = at10 == 17 && std::abs(slope - expect) <= 0.01 * expect && hbar <= 0.02;
  return {ok, fmt::format("count at s=10 {} (expect 17), slope {} vs {}, barcode entropy {}", at10, fixed(slope),
                          fixed(expect), fixed(hbar))};
}

Outcome c13_toric(Context&) {
  const auto h = power_profile(1, 2);
  GrowthSeries series;
  std::size_t bad = 0;
  for (int k = 1; k <= 100; ++k) {
    const auto c = rational_tori_count(h, k);
    bad += c.total != static_cast<std::size_t>(2 * k + 1) || c.interior_closed != static_cast<std::size_t>(2 * k + 1);
    series.index.push_back(k);
    series.counts.push_back(static_cast<double>(c.total));
  }
  const auto cert = toric_bound_check(series, 1);
  return {bad == 0 && cert.pass, fmt::format("2k+1 mismatches for k<=100: {}; degree-1 certificate {} (C1 {}, C0 {})",
                                             bad, cert.pass ? "pass" : "FAIL", fixed(cert.c_n), fixed(cert.c_0))};
}

Outcome c14_flat_torus(Context&) {
  const LatticeBasis sq;
  std::vector<double> grid;
  for (int s = 1; s <= 10000; ++s) grid.push_back(s);
  const auto counts = flat_torus_counts(sq, grid);
  std::size_t bad = 0;
  for (int s = 1; s <= 10000; ++s) {
    // Integer vectors with m² + n² ≤ s − 1, by columns.
    long lattice = 0;
    for (long m = 0; m * m <= s - 1; ++m) {
      long r = static_cast<long>(std::sqrt(static_cast<double>(s - 1 - m * m)));
      while (r * r > s - 1 - m * m) --r;
      while ((r + 1) * (r + 1) <= s - 1 - m * m) ++r;
      lattice += (m == 0 ? 1 : 2) * (2 * r + 1);
    }
    bad += counts.counts[s - 1] != static_cast<double>(2 * (lattice - 1) + 4);
  }
  const auto cert = toric_bound_check(counts, 1);
  std::vector<double> index;
  std::vector<Barcode> family;
  for (int s = 250; s <= 10000; s += 250) {
    index.push_back(s);
    family.push_back(flat_torus_loop_barcode(sq, s));
  }
  const double hbar = barcode_entropy_estimate(index, family, {1.0, 0.1}).value;
  return {bad == 0 && cert.pass && hbar <= 0.02,
          fmt::format("b_inf mismatches for s<=10^4: {}; degree-1 certificate {}; barcode entropy {}", bad,
                      cert.pass ? "pass" : "FAIL", fixed(hbar))};
}

Outcome c15_calibration(Context&) {
  auto series = [](int lo, int hi, auto f) {
    GrowthSeries s;
    for (int k = lo; k <= hi; ++k) {
      s.index.push_back(k);
      s.counts.push_back(f(k));
    }
    return s;
  };
  bool ok = true;
  std::string detail = "rates";
  for (double rho : {0.5, 1.0, 1.5}) {
    double worst = 0;
    for (double c : {1.0, 2.5, 7.0}) {
      const double v = exp_growth_rate(series(1, 40, [&](int k) { return std::floor(c * std::exp2(rho * k)); })).value;
      worst = std::max(worst, std::abs(v - rho) / rho);
    }
    ok = ok && worst <= 0.05;
    detail += fmt::format(" {}:{}%", format_real(rho), fixed(100 * worst, 2));
  }
  detail += "; degrees";
  for (int d : {0, 1, 2}) {
    const double v = poly_degree_fit(series(1, 200, [&](int k) { return 3 * std::pow(k, d) + 1; })).value;
    ok = ok && std::abs(v - d) <= 0.05;
    detail += fmt::format(" {}:{}", d, fixed(v));
  }
  return {ok, detail};
}

using Criterion = Outcome (*)(Context&);

struct Entry {
  const char* name;
  Criterion run;
};

const std::map<int, Entry>& registry() {
  static const std::map<int, Entry> r{
      {1, {"sphere Morse barcode", c1_sphere}},
      {2, {"reduction vs rank formula", c2_oracle}},
      {3, {"isolated vertices force bars", c3_isolated}},
      {4, {"stability under perturbation", c4_stability}},
      {5, {"duality and tensor products", c5_duality_tensor}},
      {6, {"doubling map entropy", c6_doubling}},
      {7, {"cat map entropy and periodic growth", c7_cat}},
      {8, {"rotation entropy", c8_rotation}},
      {9, {"volume growth below entropy", c9_yomdin}},
      {10, {"shadowing of pseudo-orbits", c10_shadowing}},
      {11, {"Crofton integral and formula", c11_crofton}},
      {12, {"ellipsoid spectrum growth", c12_ellipsoid}},
      {13, {"rational tori of x^2", c13_toric}},
      {14, {"flat torus loop barcode", c14_flat_torus}},
      {15, {"growth estimator calibration", c15_calibration}},
  };
  return r;
}

std::vector<CriterionResult> run_plain(const std::vector<int>& ids, const SuiteOptions& opt) {
  Context ctx{opt.seed, opt.exec, {}};
  std::vector<CriterionResult> out;
  for (int id : ids) {
    const auto& e = registry().at(id);
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r{id, e.name, false, "", 0.0};
    try {
      const Outcome o = e.run(ctx);
      r.pass = o.pass;
      r.detail = o.detail;
    } catch (const std::exception& ex) {
      r.detail = fmt::format("error: {}", ex.what());
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (opt.on_result) opt.on_result(r);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

std::vector<int> suite_criteria(const std::string& suite) {
  if (suite == "all") {
    std::vector<int> ids(16);
    std::iota(ids.begin(), ids.end(), 1);
    return ids;
  }
  if (suite == "fast") return {1, 2, 3, 4, 5, 8, 10, 12, 13, 14, 15, 16};
  if (!suite.empty() && std::all_of(suite.begin(), suite.end(), [](char c) { return c >= '0' && c <= '9'; }) &&
      suite.size() <= 2) {
    const int id = std::stoi(suite);
    if (id >= 1 && id <= 16) return {id};
  }
  throw Error(fmt::format("unknown suite \"{}\" (expected all, fast, or a criterion number 1-16)", suite));
}

std::vector<CriterionResult> run_suite(const std::vector<int>& ids, const SuiteOptions& opt) {
  std::vector<int> plain;
  bool repro = false;
  for (int id : ids) {
    if (id == 16) repro = true;
    else if (!registry().count(id)) throw Error(fmt::format("unknown criterion {}", id));
    else plain.push_back(id);
  }
  if (!repro) return run_plain(plain, opt);

  const int saved = omp_get_max_threads();
  const int many = std::max(2, omp_get_num_procs());
  omp_set_num_threads(many);
  SuiteOptions first = opt;
  first.exec = Exec::Parallel;
  auto results = run_plain(plain, first);
  omp_set_num_threads(1);
  SuiteOptions second = opt;
  second.exec = Exec::Serial;
  second.on_result = nullptr;
  const auto t0 = std::chrono::steady_clock::now();
  const auto again = run_plain(plain, second);
  omp_set_num_threads(saved);
  const std::string a = suite_report_json(results), b = suite_report_json(again);
  CriterionResult r{16, "reproducibility across thread counts", a == b, "", 0.0};
  r.detail = fmt::format("report of {} criteria is {} bytes; {} threads parallel vs 1 thread serial: {}", plain.size(),
                         a.size(), many, a == b ? "identical" : "DIFFERENT");
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (opt.on_result) opt.on_result(r);
  results.push_back(std::move(r));
  return results;
}

std::string result_line(const CriterionResult& r) {
  return fmt::format("criterion {:>2}  {}  {}: {}", r.id, r.pass ? "PASS" : "FAIL", r.name, r.detail);
}

std::string suite_report_json(const std::vector<CriterionResult>& results) {
  nlohmann::ordered_json j;
  j["criteria"] = nlohmann::ordered_json::array();
  std::size_t passed = 0;
  for (const auto& r : results) {
    j["criteria"].push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
    passed += r.pass;
  }
  j["passed"] = passed;
  j["total"] = results.size();
  return j.dump(2) + "\n";
}

}  // namespace hbar
