#include "gslab/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace gslab {

namespace {
std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(s);
  while (std::getline(ss, cur, sep)) out.push_back(trim(cur));
  return out;
}
}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in, const std::string& source) {
  KeyValueConfig c;
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError(source + ":" + std::to_string(no) + ": expected key=value");
    c.values_[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return c;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return parse(in, path);
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

double parse_double(const std::string& s, const std::string& what) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ConfigError(what + ": cannot parse number '" + s + "'");
  }
  if (pos != s.size()) throw ConfigError(what + ": trailing characters in '" + s + "'");
  return v;
}

long parse_int(const std::string& s, const std::string& what) {
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(s, &pos);
  } catch (const std::exception&) {
    throw ConfigError(what + ": cannot parse integer '" + s + "'");
  }
  if (pos != s.size()) throw ConfigError(what + ": trailing characters in '" + s + "'");
  return v;
}

MultiIndex parse_multi_index(const std::string& s) {
  std::string t = trim(s);
  if (!t.empty() && t.front() == '(') {
    if (t.back() != ')') throw ConfigError("multi-index: unbalanced parentheses in '" + s + "'");
    t = t.substr(1, t.size() - 2);
  }
  std::vector<int> e;
  for (const auto& part : split(t, ',')) e.push_back(static_cast<int>(parse_int(part, "multi-index")));
  if (e.empty()) throw ConfigError("multi-index: empty");
  try {
    return MultiIndex(e);
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(std::string("multi-index: ") + ex.what());
  }
}

std::vector<std::pair<double, MultiIndex>> parse_poly(const std::string& s, std::size_t n) {
  std::vector<std::pair<double, MultiIndex>> out;
  for (const auto& term : split(s, ';')) {
    if (term.empty()) continue;
    const auto at = term.find('@');
    if (at == std::string::npos) throw ConfigError("poly: expected coef@(i,...) in '" + term + "'");
    const double c = parse_double(trim(term.substr(0, at)), "poly coefficient");
    MultiIndex p = parse_multi_index(term.substr(at + 1));
    if (p.dim() != n)
      throw ConfigError("poly: exponent " + p.str() + " does not match dimension " + std::to_string(n));
    out.emplace_back(c, std::move(p));
  }
  return out;
}

TensorGrid parse_grid_spec(const std::string& s, std::size_t n) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw ConfigError("grid: expected x:lo,hi,count, got '" + s + "'");
  const auto parts = split(s.substr(colon + 1), ',');
  if (parts.size() != 3) throw ConfigError("grid: expected x:lo,hi,count, got '" + s + "'");
  const double lo = parse_double(parts[0], "grid lo");
  const double hi = parse_double(parts[1], "grid hi");
  const long count = parse_int(parts[2], "grid count");
  if (count < 2 || !(hi > lo)) throw ConfigError("grid: need lo < hi and count >= 2");
  return TensorGrid::uniform(n, lo, hi, static_cast<std::size_t>(count));
}

FamilySpec parse_family_spec(const std::string& s) {
  FamilySpec f;
  f.text = s;
  const auto colon = s.find(':');
  f.kind = trim(s.substr(0, colon));
  std::map<std::string, std::string> kv;
  if (colon != std::string::npos)
    for (const auto& part : split(s.substr(colon + 1), ',')) {
      const auto eq = part.find('=');
      if (eq == std::string::npos) throw ConfigError("family spec: expected key=value in '" + part + "'");
      kv[trim(part.substr(0, eq))] = trim(part.substr(eq + 1));
    }
  auto take = [&](const std::string& k) -> std::optional<std::string> {
    const auto it = kv.find(k);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  if (f.kind == "power") {
    if (auto v = take("p")) f.power.p = parse_double(*v, "family p");
    if (auto v = take("n")) f.power.n = static_cast<std::size_t>(parse_int(*v, "family n"));
    if (auto v = take("scale_base")) f.power.scale_base = parse_double(*v, "family scale_base");
    if (auto v = take("nu_max")) f.nu_max = static_cast<int>(parse_int(*v, "family nu_max"));
    try {
      f.power.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("family spec: ") + e.what());
    }
    if (f.nu_max < 1 || f.nu_max > WeightFamily::kClosedFormIndexCap)
      throw ConfigError("family spec: nu_max out of range");
  } else if (f.kind == "table") {
    auto d = take("dir");
    if (!d) throw ConfigError("family spec: table needs dir=PATH");
    f.dir = *d;
    if (auto v = take("count")) f.count = static_cast<int>(parse_int(*v, "family count"));
  } else {
    throw ConfigError("family spec: unknown kind '" + f.kind + "' (expected power or table)");
  }
  if (!kv.empty()) throw ConfigError("family spec: unknown key '" + kv.begin()->first + "'");
  return f;
}

WeightFamily make_family(const FamilySpec& spec) {
  try {
    if (spec.kind == "power") return WeightFamily::power(spec.power, spec.nu_max);
    return WeightFamily::from_table_dir(spec.dir, spec.count);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("family: ") + e.what());
  } catch (const std::runtime_error& e) {
    throw ConfigError(std::string("family: ") + e.what());
  }
}

TestFunctionSpec function_spec_from(const KeyValueConfig& cfg, const std::string& prefix) {
  TestFunctionSpec s;
  if (auto v = cfg.get(prefix + "kind")) s.kind = *v;
  if (s.kind != "gaussian_poly") throw ConfigError("unknown function kind '" + s.kind + "'");
  if (auto v = cfg.get(prefix + "a")) s.a = parse_double(*v, prefix + "a");
  if (!(s.a > 0.0)) throw ConfigError(prefix + "a must be positive");
  if (auto v = cfg.get(prefix + "n")) s.n = static_cast<std::size_t>(parse_int(*v, prefix + "n"));
  if (s.n < 1 || s.n > 3) throw ConfigError(prefix + "n must be 1, 2 or 3");
  if (auto v = cfg.get(prefix + "poly")) s.poly = parse_poly(*v, s.n);
  return s;
}

}  // namespace gslab
