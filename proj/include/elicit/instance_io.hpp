#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "elicit/valuation.hpp"

namespace elicit {

inline constexpr const char* kInstanceMagic = "ELICIT-INSTANCES";
inline constexpr int kInstanceVersion = 1;

/// FNV-1a over (k, n, all values) so harness rows can show that every policy
/// saw the same instance.
inline std::uint64_t instance_hash(const std::vector<TrueValuation>& truths) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t x) {
    for (int i = 0; i < 8; ++i) {
      h ^= (x >> (8 * i)) & 0xff;
      h *= 1099511628211ULL;
    }
  };
  mix(truths.empty() ? 0 : static_cast<std::uint64_t>(truths[0].k));
  mix(truths.size());
  for (const TrueValuation& t : truths)
    for (std::int64_t v : t.value) mix(static_cast<std::uint64_t>(v));
  return h;
}

/// Text format, versioned header, then one line of 2^k integers per agent in
/// bundle enumeration order.
inline void save_instance(std::ostream& os, const std::vector<TrueValuation>& truths) {
  const int k = truths.empty() ? 0 : truths[0].k;
  os << kInstanceMagic << " " << kInstanceVersion << "\n";
  os << "k " << k << " n " << truths.size() << "\n";
  for (const TrueValuation& t : truths) {
    for (std::size_t i = 0; i < t.value.size(); ++i) {
      if (i) os << ' ';
      os << t.value[i];
    }
    os << "\n";
  }
}

inline void save_instance_file(const std::string& path, const std::vector<TrueValuation>& truths) {
  std::ofstream os(path);
  if (!os) throw ParseError("cannot open " + path + " for writing");
  save_instance(os, truths);
}

inline std::vector<TrueValuation> load_instance(std::istream& is, const std::string& name = "<stream>") {
  int lineno = 0;
  std::string line;
  auto next_line = [&]() {
    if (!std::getline(is, line))
      throw ParseError(name + ":" + std::to_string(lineno + 1) + ": unexpected end of file");
    ++lineno;
  };

  next_line();
  {
    std::istringstream ss(line);
    std::string magic;
    int version = 0;
    if (!(ss >> magic >> version) || magic != kInstanceMagic)
      throw ParseError(name + ":1: not an instance file");
    if (version != kInstanceVersion)
      throw ParseError(name + ":1: unsupported version " + std::to_string(version));
  }

  int k = -1;
  std::size_t n = 0;
  next_line();
  {
    std::istringstream ss(line);
    std::string kw1, kw2;
    if (!(ss >> kw1 >> k >> kw2 >> n) || kw1 != "k" || kw2 != "n")
      throw ParseError(name + ":2: expected \"k <items> n <agents>\"");
  }
  const std::size_t expected = bundle_count(k);

  std::vector<TrueValuation> truths;
  truths.reserve(n);
  for (std::size_t a = 0; a < n; ++a) {
    next_line();
    std::istringstream ss(line);
    TrueValuation t;
    t.k = k;
    std::int64_t v;
    while (ss >> v) t.value.push_back(v);
    if (t.value.size() != expected)
      throw ParseError(name + ":" + std::to_string(lineno) + ": expected " +
                       std::to_string(expected) + " values, got " + std::to_string(t.value.size()));
    if (t.value[0] != 0)
      throw ParseError(name + ":" + std::to_string(lineno) + ": empty bundle must be worth 0");
    if (!t.free_disposal_ok())
      throw ParseError(name + ":" + std::to_string(lineno) + ": values violate free disposal");
    truths.push_back(std::move(t));
  }
  return truths;
}

inline std::vector<TrueValuation> load_instance_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open " + path);
  return load_instance(is, path);
}

}  // namespace elicit
