#pragma once

#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gslab/gridcore.hpp"
#include "gslab/spaces.hpp"
#include "gslab/weights.hpp"

namespace gslab {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Plain key=value lines; '#' starts a comment; later keys override earlier ones.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in, const std::string& source = "<config>");
  static KeyValueConfig load(const std::string& path);

  std::optional<std::string> get(const std::string& key) const;
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

double parse_double(const std::string& s, const std::string& what);
long parse_int(const std::string& s, const std::string& what);

// "(1,0,2)" or "1,0,2"
MultiIndex parse_multi_index(const std::string& s);
// "1@(0);0.5@(2)"
std::vector<std::pair<double, MultiIndex>> parse_poly(const std::string& s, std::size_t n);
// "x:lo,hi,count", the same axis for every coordinate
TensorGrid parse_grid_spec(const std::string& s, std::size_t n);

struct FamilySpec {
  std::string kind;  // power | table
  MFamilySpec power;
  int nu_max = 8;
  std::string dir;
  int count = 0;
  std::string text;
};

// power:p=2,n=1,nu_max=8[,scale_base=2]  or  table:dir=PATH[,count=K]
FamilySpec parse_family_spec(const std::string& s);
WeightFamily make_family(const FamilySpec& spec);

// keys f.kind, f.a, f.poly, f.n under the given prefix
TestFunctionSpec function_spec_from(const KeyValueConfig& cfg, const std::string& prefix = "f.");

}  // namespace gslab
