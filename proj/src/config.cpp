#include "fosl/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "fosl/geometry.hpp"

namespace fosl {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size() || !std::isfinite(d)) throw std::invalid_argument("");
    return d;
  } catch (const std::exception&) {
    throw ConfigError(key, "expected a number, got '" + v + "'");
  }
}

long long to_integer(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long i = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument("");
    return i;
  } catch (const std::exception&) {
    throw ConfigError(key, "expected an integer, got '" + v + "'");
  }
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names = {"c_beta",   "doubling",  "inverse_laws", "ahlfors",
                                                 "poincare", "holder",    "geometric",    "embedding",
                                                 "testfn_bound", "extension", "nontriviality"};
  return names;
}

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
  return write_config(*this) == write_config(o);
}

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("line " + std::to_string(e.line()), e.message());
  }
  ExperimentConfig c;
  static const std::set<std::string> sections = {"experiment", "domain", "young", "family",
                                                 "ball",       "cutoff", "tolerances"};
  for (const auto& [name, sec] : tree) {
    if (!sections.contains(name)) throw ConfigError(name, "unknown section");
    if (sec.empty() && !sec.data().empty()) throw ConfigError(name, "key outside of any section");
  }
  if (!tree.get_child_optional("domain")) throw ConfigError("domain", "missing section");
  if (!tree.get_child_optional("young")) throw ConfigError("young", "missing section");

  auto each = [&](const std::string& section, auto&& fn) {
    if (const auto sec = tree.get_child_optional(section)) {
      for (const auto& [key, node] : *sec) fn(key, trim(node.data()), section + "." + key);
    }
  };

  each("experiment", [&](const std::string& k, const std::string& v, const std::string& path) {
    if (k == "beta") {
      c.beta = to_double(path, v);
      if (!(c.beta > 0.0)) throw ConfigError(path, "beta must be > 0");
    } else if (k == "seed") {
      const long long s = to_integer(path, v);
      if (s < 0) throw ConfigError(path, "seed must be >= 0");
      c.seed = static_cast<std::uint64_t>(s);
    } else if (k == "threads") {
      const long long t = to_integer(path, v);
      if (t < 0 || t > 1024) throw ConfigError(path, "threads must be in [0, 1024]");
      c.threads = static_cast<unsigned>(t);
    } else if (k == "output") {
      if (v.empty()) throw ConfigError(path, "empty output directory");
      c.output = v;
    } else if (k == "checks") {
      c.checks = split_list(v);
      std::set<std::string> seen;
      for (const auto& id : c.checks) {
        if (std::find(check_names().begin(), check_names().end(), id) == check_names().end()) {
          throw ConfigError(path, "unknown check '" + id + "'");
        }
        if (!seen.insert(id).second) throw ConfigError(path, "check '" + id + "' listed twice");
      }
    } else if (k == "resolutions") {
      c.resolutions.clear();
      for (const auto& item : split_list(v)) {
        const long long r = to_integer(path, item);
        if (r < 4 || r > 4096) throw ConfigError(path, "resolution must be in [4, 4096]");
        c.resolutions.push_back(static_cast<int>(r));
      }
      if (c.resolutions.empty()) throw ConfigError(path, "empty list");
    } else if (k == "trials") {
      c.trials = static_cast<int>(to_integer(path, v));
      if (c.trials <= 0) throw ConfigError(path, "trials must be > 0");
    } else if (k == "samples") {
      c.samples = static_cast<int>(to_integer(path, v));
      if (c.samples <= 0) throw ConfigError(path, "samples must be > 0");
    } else {
      throw ConfigError(path, "unknown key");
    }
  });

  bool have_shape = false;
  each("domain", [&](const std::string& k, const std::string& v, const std::string& path) {
    if (k == "shape") {
      c.domain_shape = v;
      have_shape = true;
    } else {
      c.domain_params[k] = to_double(path, v);
    }
  });
  if (!have_shape) throw ConfigError("domain.shape", "missing");
  if (std::find(domain_names().begin(), domain_names().end(), c.domain_shape) == domain_names().end()) {
    throw ConfigError("domain.shape", "unknown domain '" + c.domain_shape + "'");
  }
  try {
    make_domain(c.domain_shape, c.domain_params);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("domain", e.what());
  }

  bool have_family = false;
  each("young", [&](const std::string& k, const std::string& v, const std::string& path) {
    if (k == "family") {
      c.young_family = v;
      have_family = true;
    } else {
      c.young_params[k] = to_double(path, v);
    }
  });
  if (!have_family) throw ConfigError("young.family", "missing");
  if (std::find(young_family_names().begin(), young_family_names().end(), c.young_family) ==
      young_family_names().end()) {
    throw ConfigError("young.family", "unknown Young family '" + c.young_family + "'");
  }
  try {
    make_young(c.young_family, c.young_params);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("young", e.what());
  }

  each("family", [&](const std::string& k, const std::string& v, const std::string& path) {
    if (k == "kind") {
      try {
        family_kind_from_string(v);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(path, e.what());
      }
      c.family_kind = v;
    } else if (k == "count") {
      c.family_count = static_cast<int>(to_integer(path, v));
      if (c.family_count < 0) throw ConfigError(path, "count must be >= 0");
    } else {
      throw ConfigError(path, "unknown key");
    }
  });

  each("ball", [&](const std::string& k, const std::string& v, const std::string& path) {
    if (k == "radius") {
      c.ball_radius = to_double(path, v);
      if (!(c.ball_radius > 0.0)) throw ConfigError(path, "radius must be > 0");
    } else if (k == "cx") {
      c.ball_cx = to_double(path, v);
    } else if (k == "cy") {
      c.ball_cy = to_double(path, v);
    } else {
      throw ConfigError(path, "unknown key");
    }
  });

  each("cutoff", [&](const std::string& k, const std::string& v, const std::string& path) {
    if (k == "x") c.cutoff_x = to_double(path, v);
    else if (k == "y") c.cutoff_y = to_double(path, v);
    else if (k == "r") c.cutoff_r = to_double(path, v);
    else if (k == "t") c.cutoff_t = to_double(path, v);
    else throw ConfigError(path, "unknown key");
  });
  if (!(c.cutoff_r > 0.0 && c.cutoff_t > c.cutoff_r)) throw ConfigError("cutoff", "need 0 < r < t");

  each("tolerances", [&](const std::string& k, const std::string& v, const std::string& path) {
    double* slot = nullptr;
    if (k == "poincare") slot = &c.tol.poincare;
    else if (k == "testfn") slot = &c.tol.testfn;
    else if (k == "holder") slot = &c.tol.holder;
    else if (k == "geometric_drift") slot = &c.tol.geometric_drift;
    else if (k == "embedding_drift") slot = &c.tol.embedding_drift;
    else if (k == "extension_drift") slot = &c.tol.extension_drift;
    else if (k == "stable_growth") slot = &c.tol.stable_growth;
    else if (k == "divergent_growth") slot = &c.tol.divergent_growth;
    else if (k == "inverse_slack") slot = &c.tol.inverse_slack;
    else throw ConfigError(path, "unknown key");
    *slot = to_double(path, v);
    if (*slot < 0.0) throw ConfigError(path, "tolerance must be >= 0");
  });
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot read config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string write_config(const ExperimentConfig& c) {
  std::ostringstream out;
  auto join = [](const auto& items) {
    std::string s;
    for (const auto& it : items) {
      if (!s.empty()) s += ",";
      if constexpr (std::is_same_v<std::decay_t<decltype(it)>, std::string>) {
        s += it;
      } else {
        s += std::to_string(it);
      }
    }
    return s;
  };
  out << "[experiment]\n"
      << "beta=" << fmt(c.beta) << "\n"
      << "seed=" << c.seed << "\n"
      << "threads=" << c.threads << "\n"
      << "output=" << c.output << "\n"
      << "checks=" << join(c.checks) << "\n"
      << "resolutions=" << join(c.resolutions) << "\n"
      << "trials=" << c.trials << "\n"
      << "samples=" << c.samples << "\n\n";
  out << "[domain]\nshape=" << c.domain_shape << "\n";
  for (const auto& [k, v] : c.domain_params) out << k << "=" << fmt(v) << "\n";
  out << "\n[young]\nfamily=" << c.young_family << "\n";
  for (const auto& [k, v] : c.young_params) out << k << "=" << fmt(v) << "\n";
  out << "\n[family]\nkind=" << c.family_kind << "\ncount=" << c.family_count << "\n";
  out << "\n[ball]\nradius=" << fmt(c.ball_radius) << "\ncx=" << fmt(c.ball_cx) << "\ncy=" << fmt(c.ball_cy)
      << "\n";
  out << "\n[cutoff]\nx=" << fmt(c.cutoff_x) << "\ny=" << fmt(c.cutoff_y) << "\nr=" << fmt(c.cutoff_r)
      << "\nt=" << fmt(c.cutoff_t) << "\n";
  const Tolerances& t = c.tol;
  out << "\n[tolerances]\n"
      << "poincare=" << fmt(t.poincare) << "\n"
      << "testfn=" << fmt(t.testfn) << "\n"
      << "holder=" << fmt(t.holder) << "\n"
      << "geometric_drift=" << fmt(t.geometric_drift) << "\n"
      << "embedding_drift=" << fmt(t.embedding_drift) << "\n"
      << "extension_drift=" << fmt(t.extension_drift) << "\n"
      << "stable_growth=" << fmt(t.stable_growth) << "\n"
      << "divergent_growth=" << fmt(t.divergent_growth) << "\n"
      << "inverse_slack=" << fmt(t.inverse_slack) << "\n";
  return out.str();
}

std::string config_hash(const ExperimentConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : write_config(c)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace fosl
