#include "hbar/growth.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hbar {

void GrowthSeries::validate() const {
  if (index.size() != counts.size()) throw Error("growth series: index and counts differ in length");
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (!std::isfinite(index[i])) throw Error(fmt::format("growth series: index #{} is not finite", i));
    if (!(counts[i] >= 0)) throw Error(fmt::format("growth series: count #{} is negative", i));
    if (i > 0 && !(index[i] > index[i - 1]))
      throw Error(fmt::format("growth series: index #{} does not increase", i));
  }
}

std::string growth_to_csv(const GrowthSeries& s, const std::string& index_name) {
  std::string out = index_name + ",count\n";
  for (std::size_t i = 0; i < s.size(); ++i)
    out += format_real(s.index[i]) + "," + format_real(s.counts[i]) + "\n";
  return out;
}

GrowthSeries growth_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  GrowthSeries s;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || lineno == 1) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw Error(fmt::format("growth csv line {}: expected index,count", lineno));
    try {
      s.index.push_back(std::stod(line.substr(0, comma)));
      s.counts.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw Error(fmt::format("growth csv line {}: not a number", lineno));
    }
  }
  s.validate();
  return s;
}

namespace {

struct Line {
  double slope, residual;
};

Line least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0) throw Error("least squares: index range is degenerate");
  const double slope = sxy / sxx;
  double ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (my + slope * (x[i] - mx));
    ss += e * e;
  }
  return {slope, std::sqrt(ss / n)};
}

std::size_t tail_start(const GrowthSeries& s) {
  const double mid = 0.5 * (s.index.front() + s.index.back());
  return static_cast<std::size_t>(std::lower_bound(s.index.begin(), s.index.end(), mid) -
                                  s.index.begin());
}

}  // namespace

RateFit exp_growth_rate(const GrowthSeries& s) {
  s.validate();
  if (s.size() < 4) throw Error("exp_growth_rate: need at least 4 points");
  RateFit fit;
  fit.lo = tail_start(s);
  fit.hi = s.size();
  std::vector<double> x, y;
  for (std::size_t i = fit.lo; i < fit.hi; ++i)
    if (s.counts[i] > 0) {
      x.push_back(s.index[i]);
      y.push_back(std::log2(s.counts[i]));
    }
  fit.points = x.size();
  if (x.empty()) return fit;
  if (x.size() < 4)
    throw Error(fmt::format("exp_growth_rate: only {} positive counts in the tail", x.size()));
  const Line l = least_squares(x, y);
  fit.value = l.slope;
  fit.residual = l.residual;
  return fit;
}

RateFit poly_degree_fit(const GrowthSeries& s) {
  s.validate();
  if (s.size() < 6) throw Error("poly_degree_fit: need at least 6 points");
  RateFit fit;
  fit.lo = tail_start(s);
  fit.hi = s.size();
  std::vector<double> x, y;
  std::size_t dropped = 0;
  for (std::size_t i = fit.lo; i < fit.hi; ++i) {
    if (s.counts[i] > 0 && s.index[i] > 0) {
      x.push_back(std::log2(s.index[i]));
      y.push_back(std::log2(s.counts[i]));
    } else {
      ++dropped;
    }
  }
  if (dropped) fit.warnings.push_back(fmt::format("{} nonpositive points dropped from the tail", dropped));
  fit.points = x.size();
  if (x.size() < 2) throw Error("poly_degree_fit: fewer than 2 usable tail points");
  const Line l = least_squares(x, y);
  fit.value = l.slope;
  fit.residual = l.residual;
  return fit;
}

RateFit linear_fit(const GrowthSeries& s) {
  s.validate();
  if (s.size() < 2) throw Error("linear_fit: need at least 2 points");
  RateFit fit;
  fit.hi = fit.points = s.size();
  const Line l = least_squares(s.index, s.counts);
  fit.value = l.slope;
  fit.residual = l.residual;
  return fit;
}

Certificate toric_bound_check(const GrowthSeries& s, int n) {
  s.validate();
  if (s.size() < 2) throw Error("toric_bound_check: need at least 2 points");
  if (n < 0) throw Error("toric_bound_check: degree must be >= 0");
  Certificate cert;
  cert.degree = n;
  cert.c_0 = s.counts.front();
  const std::size_t train = std::max<std::size_t>(1, s.size() / 2);
  for (std::size_t i = 0; i < train; ++i) {
    const double p = std::pow(s.index[i], n);
    if (p > 0) cert.c_n = std::max(cert.c_n, s.counts[i] / p);
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double bound = cert.c_n * std::pow(s.index[i], n) + cert.c_0;
    if (s.counts[i] > bound) ++cert.violations;
    if (bound > 0) cert.worst_ratio = std::max(cert.worst_ratio, s.counts[i] / bound);
    else if (s.counts[i] > 0) cert.worst_ratio = kInf;
  }
  cert.pass = cert.violations == 0;
  return cert;
}

BarcodeEntropy barcode_entropy_from_series(const std::vector<GrowthSeries>& series,
                                           const std::vector<double>& eps_grid) {
  if (eps_grid.empty() || series.size() != eps_grid.size())
    throw Error("barcode entropy: need one series per eps");
  BarcodeEntropy out;
  std::vector<std::size_t> order(eps_grid.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return eps_grid[a] > eps_grid[b]; });
  for (std::size_t i : order) {
    out.eps.push_back(eps_grid[i]);
    out.rates.push_back(exp_growth_rate(series[i]));
  }
  for (std::size_t k = 1; k < out.rates.size(); ++k) {
    const double slack = 1e-6 + out.rates[k].residual + out.rates[k - 1].residual;
    if (out.rates[k].value < out.rates[k - 1].value - slack) out.monotone = false;
  }
  out.value = std::max(0.0, out.rates.back().value);
  return out;
}

namespace {

template <class B, class Count>
BarcodeEntropy entropy_of(const std::vector<double>& index, const std::vector<B>& family,
                          const std::vector<double>& eps_grid, Count count) {
  if (index.size() != family.size()) throw Error("barcode entropy: index and family differ in length");
  if (family.size() < 4) throw Error("barcode entropy: need at least 4 barcodes");
  std::vector<GrowthSeries> series;
  for (double eps : eps_grid) {
    if (!(eps > 0)) throw Error("barcode entropy: eps must be > 0");
    GrowthSeries s{index, {}};
    for (const auto& b : family) s.counts.push_back(static_cast<double>(count(b, eps)));
    series.push_back(std::move(s));
  }
  return barcode_entropy_from_series(series, eps_grid);
}

}  // namespace

BarcodeEntropy barcode_entropy_estimate(const std::vector<double>& index,
                                        const std::vector<Barcode>& family,
                                        const std::vector<double>& eps_grid) {
  return entropy_of(index, family, eps_grid,
                    [](const Barcode& b, double eps) { return barcode_function(b, eps); });
}

BarcodeEntropy barcode_entropy_estimate(const std::vector<double>& index,
                                        const std::vector<UnpinnedBarcode>& family,
                                        const std::vector<double>& eps_grid) {
  return entropy_of(index, family, eps_grid, b_eps_unpinned);
}

}  // namespace hbar
