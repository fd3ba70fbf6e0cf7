#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "isowalk/errors.hpp"
#include "isowalk/plancherel.hpp"
#include "isowalk/root_system.hpp"

namespace isowalk {

inline std::string trim(const std::string& s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

inline double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("cannot parse " + what + " '" + s + "' as a number");
  }
}

inline long long parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("cannot parse " + what + " '" + s + "' as an integer");
  }
}

inline std::vector<double> parse_doubles(const std::string& s, const std::string& what) {
  std::vector<double> out;
  for (const std::string& t : split(s, ',')) out.push_back(parse_double(t, what));
  return out;
}

inline Coweight parse_coweight(const std::string& s) {
  Coweight c;
  for (const std::string& t : split(s, ',')) c.push_back(static_cast<int>(parse_int(t, "coweight coordinate")));
  return c;
}

// "c1,...,cn : weight" or the shorthand "λj:weight" / "lj:weight" for a fundamental coweight
inline std::pair<Coweight, double> parse_walk_term(const std::string& text, int rank) {
  auto colon = text.rfind(':');
  if (colon == std::string::npos) throw ValidationError("walk term '" + text + "' needs the form coords : weight");
  std::string lhs = trim(text.substr(0, colon));
  double w = parse_double(trim(text.substr(colon + 1)), "walk weight");
  for (const std::string& prefix : {std::string("λ"), std::string("l"), std::string("L")}) {
    if (lhs.rfind(prefix, 0) == 0 && lhs.find(',') == std::string::npos) {
      long long j = parse_int(lhs.substr(prefix.size()), "fundamental coweight index");
      if (j < 1 || j > rank) throw ValidationError("fundamental coweight index out of range in '" + text + "'");
      Coweight c(rank, 0);
      c[j - 1] = 1;
      return {c, w};
    }
  }
  Coweight c = parse_coweight(lhs);
  if (static_cast<int>(c.size()) != rank)
    throw ValidationError("walk term '" + text + "' has " + std::to_string(c.size()) + " coordinates, expected " +
                          std::to_string(rank));
  return {c, w};
}

// Parameter system, walk and command knobs.
struct RunConfig {
  std::string family = "A";
  int rank = 1;
  std::vector<double> q{2.0};
  std::vector<std::string> walk_text;
  std::map<std::string, std::string> knobs;
  std::string format = "json";
  int threads = 1;

  Family family_enum() const { return parse_family(family); }

  WalkTerms walk_terms() const {
    WalkTerms t;
    for (const std::string& s : walk_text) t.push_back(parse_walk_term(s, rank));
    return t;
  }

  bool has(const std::string& key) const { return knobs.count(key) > 0; }
  std::string get(const std::string& key, const std::string& fallback) const {
    auto it = knobs.find(key);
    return it == knobs.end() ? fallback : it->second;
  }
  long long get_int(const std::string& key, long long fallback) const {
    auto it = knobs.find(key);
    return it == knobs.end() ? fallback : parse_int(it->second, key);
  }
  double get_double(const std::string& key, double fallback) const {
    auto it = knobs.find(key);
    return it == knobs.end() ? fallback : parse_double(it->second, key);
  }

  // key = value lines; '#' starts a comment; walk.term may repeat
  void load(std::istream& in) {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ValidationError("config line " + std::to_string(lineno) + " has no '=': " + line);
      set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
  }
  void load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file " + path);
    load(in);
  }

  void set(const std::string& key, const std::string& value) {
    if (key == "family") {
      family = value;
    } else if (key == "rank") {
      rank = static_cast<int>(parse_int(value, "rank"));
    } else if (key == "q") {
      q = parse_doubles(value, "q");
    } else if (key.rfind("q", 0) == 0 && key.size() > 1 && key.find_first_not_of("0123456789", 1) == std::string::npos) {
      std::size_t i = static_cast<std::size_t>(parse_int(key.substr(1), "q index"));
      if (q.size() <= i) q.resize(i + 1, q.empty() ? 2.0 : q.back());
      q[i] = parse_double(value, key);
    } else if (key == "walk.term") {
      walk_text.push_back(value);
    } else if (key == "walk") {
      for (const std::string& t : split(value, ';'))
        if (!t.empty()) walk_text.push_back(t);
    } else if (key == "format") {
      if (value != "json" && value != "csv") throw ValidationError("format must be json or csv");
      format = value;
    } else if (key == "threads") {
      threads = static_cast<int>(parse_int(value, "threads"));
      if (threads < 1) throw ValidationError("threads must be positive");
    } else {
      knobs[key] = value;
    }
  }
};

}  // namespace isowalk
