#include "hbar/barcode.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include "json.hpp"
#include <sstream>
#include <tuple>

namespace hbar {
namespace {

auto key(const Bar& b) { return std::make_tuple(b.start, b.end, b.degree.value_or(-1)); }

}  // namespace

Barcode::Barcode(std::vector<Bar> bars) : bars_(std::move(bars)) { normalize(); }

void Barcode::add(double start, double end, std::size_t multiplicity,
                  std::optional<int> degree) {
  bars_.push_back(Bar{start, end, multiplicity, degree});
  normalize();
}

void Barcode::normalize() {
  for (const auto& b : bars_) {
    if (!(b.start < b.end))
      throw Error(fmt::format("bar ({}, {}] is empty", format_real(b.start), format_real(b.end)));
    if (std::isnan(b.start) || std::isnan(b.end)) throw Error("bar endpoint is NaN");
    if (b.multiplicity == 0) throw Error("bar multiplicity must be positive");
  }
  std::sort(bars_.begin(), bars_.end(), [](const Bar& a, const Bar& b) { return key(a) < key(b); });
  std::vector<Bar> merged;
  for (const auto& b : bars_) {
    if (!merged.empty() && key(merged.back()) == key(b))
      merged.back().multiplicity += b.multiplicity;
    else
      merged.push_back(b);
  }
  bars_ = std::move(merged);
}

std::vector<double> Barcode::spectrum() const {
  std::vector<double> s;
  for (const auto& b : bars_) {
    s.push_back(b.start);
    if (!b.infinite()) s.push_back(b.end);
  }
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

std::size_t Barcode::total() const {
  std::size_t n = 0;
  for (const auto& b : bars_) n += b.multiplicity;
  return n;
}

bool Barcode::same_intervals(const Barcode& other) const {
  std::map<std::pair<double, double>, std::size_t> a, b;
  for (const auto& x : bars_) a[{x.start, x.end}] += x.multiplicity;
  for (const auto& x : other.bars_) b[{x.start, x.end}] += x.multiplicity;
  return a == b;
}

bool Barcode::operator==(const Barcode& other) const {
  if (bars_.size() != other.bars_.size()) return false;
  for (std::size_t i = 0; i < bars_.size(); ++i)
    if (key(bars_[i]) != key(other.bars_[i]) || bars_[i].multiplicity != other.bars_[i].multiplicity)
      return false;
  return true;
}

std::size_t barcode_function(const Barcode& b, double eps, double s) {
  if (!(eps > 0)) throw Error("barcode_function: eps must be positive");
  std::size_t n = 0;
  for (const auto& bar : b.bars())
    if (bar.start < s && bar.length() > eps) n += bar.multiplicity;
  return n;
}

double beta_max(const Barcode& b) {
  double m = 0.0;
  for (const auto& bar : b.bars())
    if (!bar.infinite()) m = std::max(m, bar.length());
  return m;
}

std::string format_real(double x) {
  if (x == kInf) return "inf";
  if (x == -kInf) return "-inf";
  return fmt::format("{}", x);
}

std::string barcode_to_csv(const Barcode& b) {
  std::string out = "start,end,multiplicity\n";
  for (const auto& bar : b.bars())
    out += fmt::format("{},{},{}\n", format_real(bar.start), format_real(bar.end), bar.multiplicity);
  return out;
}

Barcode barcode_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("start,end,multiplicity", 0) != 0)
    throw Error("barcode CSV: missing header start,end,multiplicity");
  std::vector<Bar> bars;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::istringstream row(line);
    std::string f0, f1, f2;
    if (!std::getline(row, f0, ',') || !std::getline(row, f1, ',') || !std::getline(row, f2))
      throw Error(fmt::format("barcode CSV line {}: expected 3 fields", lineno));
    try {
      Bar bar;
      bar.start = std::stod(f0);
      bar.end = (f1 == "inf" || f1 == "inf\r") ? kInf : std::stod(f1);
      bar.multiplicity = std::stoul(f2);
      bars.push_back(bar);
    } catch (const std::exception&) {
      throw Error(fmt::format("barcode CSV line {}: malformed number", lineno));
    }
  }
  return Barcode(std::move(bars));
}

std::string barcode_to_json(const Barcode& b) {
  nlohmann::ordered_json bars = nlohmann::ordered_json::array();
  for (const auto& bar : b.bars()) {
    nlohmann::ordered_json j;
    j["start"] = bar.start;
    if (bar.infinite())
      j["end"] = "inf";
    else
      j["end"] = bar.end;
    j["multiplicity"] = bar.multiplicity;
    if (bar.degree) j["degree"] = *bar.degree;
    bars.push_back(std::move(j));
  }
  nlohmann::ordered_json root;
  root["bars"] = std::move(bars);
  return root.dump(2) + "\n";
}

}  // namespace hbar
