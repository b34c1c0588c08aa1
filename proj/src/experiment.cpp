#include "subdyadic/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "subdyadic/plot.hpp"

namespace subdyadic {

namespace {

const std::set<std::string> kParamKeys = {"alpha", "beta", "sigma", "lambda", "p", "q",
                                          "s", "k", "R", "a", "b", "gamma"};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

struct Token {
  std::string text;
  bool quoted = false;
};

// A scalar or a one-line [list]; elements are quoted strings or bare words.
std::vector<Token> parse_value(const std::string& raw, const std::string& where) {
  std::string v = trim(raw);
  if (v.empty()) throw ConfigError(where + ": missing value");
  const bool list = v.front() == '[';
  if (list) {
    if (v.back() != ']') throw ConfigError(where + ": unterminated list");
    v = v.substr(1, v.size() - 2);
  }
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < v.size()) {
    while (i < v.size() && (v[i] == ' ' || v[i] == '\t')) ++i;
    if (i >= v.size()) break;
    Token t;
    if (v[i] == '"' || v[i] == '\'') {
      const char q = v[i];
      const auto end = v.find(q, i + 1);
      if (end == std::string::npos) throw ConfigError(where + ": unterminated string");
      t.text = v.substr(i + 1, end - i - 1);
      t.quoted = true;
      i = end + 1;
    } else {
      const auto end = v.find(',', i);
      t.text = trim(v.substr(i, end == std::string::npos ? std::string::npos : end - i));
      i = end == std::string::npos ? v.size() : end;
      if (t.text.empty()) throw ConfigError(where + ": empty list element");
    }
    out.push_back(std::move(t));
    while (i < v.size() && (v[i] == ' ' || v[i] == '\t')) ++i;
    if (i < v.size()) {
      if (v[i] != ',') throw ConfigError(where + ": expected ',' in list");
      if (!list) throw ConfigError(where + ": several values need [ ]");
      ++i;
    }
  }
  return out;
}

double to_number(const Token& t, const std::string& where) {
  if (t.quoted) throw ConfigError(where + ": expected a number, got \"" + t.text + "\"");
  if (t.text == "inf" || t.text == "infinity") return INFINITY;
  if (t.text == "nan") return NAN;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t.text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != t.text.size()) throw ConfigError(where + ": expected a number, got '" + t.text + "'");
  return v;
}

long long to_integer(const Token& t, const std::string& where) {
  const double v = to_number(t, where);
  if (!std::isfinite(v) || v != std::floor(v)) throw ConfigError(where + ": expected an integer");
  return static_cast<long long>(v);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string params_text(const ParamList& params) {
  std::string s;
  for (const auto& [k, v] : params) s += (s.empty() ? "" : ";") + k + "=" + fmt(v);
  return s;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    const std::string where = source + ":" + std::to_string(lineno);
    // strip a comment outside quotes
    bool inq = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') inq = !inq;
      if (line[i] == '#' && !inq) {
        line.resize(i);
        break;
      }
    }
    if (trim(line).empty()) continue;
    const auto sep = line.find_first_of("=:");
    if (sep == std::string::npos) throw ConfigError(where + ": expected key = value");
    std::string key = trim(line.substr(0, sep));
    if (key == "test") key = "tests";
    if (key == "d") key = "dim";
    if (!seen.insert(key).second) throw ConfigError(where + ": duplicate key '" + key + "'");
    const auto vals = parse_value(line.substr(sep + 1), where);

    if (key == "tests") {
      for (const auto& t : vals) cfg.tests.push_back(t.text);
    } else if (key == "dim") {
      if (vals.size() != 1) throw ConfigError(where + ": dim takes one value");
      cfg.dim = static_cast<int>(to_integer(vals[0], where));
      if (cfg.dim != 1 && cfg.dim != 2) throw ConfigError(where + ": dim must be 1 or 2");
    } else if (key == "sizes") {
      for (const auto& t : vals) {
        const long long n = to_integer(t, where);
        if (n < 4 || (n & (n - 1)) != 0) throw ConfigError(where + ": sizes must be powers of two >= 4");
        cfg.sizes.push_back(static_cast<int>(n));
      }
    } else if (key == "length") {
      if (vals.size() != 1) throw ConfigError(where + ": length takes one value");
      cfg.length = to_number(vals[0], where);
      if (!(cfg.length > 0.0) || !std::isfinite(cfg.length)) throw ConfigError(where + ": length must be positive");
    } else if (key == "seed") {
      if (vals.size() != 1) throw ConfigError(where + ": seed takes one value");
      const long long s = to_integer(vals[0], where);
      if (s < 0) throw ConfigError(where + ": seed must be non-negative");
      cfg.seed = static_cast<std::uint64_t>(s);
    } else if (key == "out") {
      if (vals.size() != 1) throw ConfigError(where + ": out takes one value");
      cfg.out_dir = vals[0].text;
    } else if (key == "workers") {
      if (vals.size() != 1) throw ConfigError(where + ": workers takes one value");
      cfg.workers = static_cast<int>(to_integer(vals[0], where));
      if (cfg.workers < 1) throw ConfigError(where + ": workers must be at least 1");
    } else if (kParamKeys.count(key)) {
      auto& g = cfg.grid[key];
      for (const auto& t : vals) g.push_back(to_number(t, where));
    } else {
      throw ConfigError(where + ": unknown key '" + key + "'");
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  return parse_config(in, path);
}

std::string Outcome::csv_header() { return "tag,test,name,params,constant,verdict"; }

std::string Outcome::csv_row() const {
  return tag + "," + test + "," + name + "," + params_text(params) + "," + fmt(constant) + "," + verdict;
}

int exit_status(const std::vector<Outcome>& outcomes) {
  int s = 0;
  for (const auto& o : outcomes) {
    if (o.verdict == "violated") s = std::max(s, 2);
    else if (o.verdict == "growing") s = std::max(s, 1);
  }
  return s;
}

namespace {

struct Job {
  const RegistryEntry* entry;
  ParamList params;
};

std::vector<Job> expand(const ExperimentConfig& cfg, const RunContext& ctx) {
  std::vector<Job> jobs;
  for (const auto& name : cfg.tests) {
    const RegistryEntry& e = find_test(name);
    std::vector<std::vector<double>> axes;
    for (const auto& [key, def] : e.defaults) {
      auto it = cfg.grid.find(key);
      axes.push_back(it != cfg.grid.end() && !it->second.empty() ? it->second : std::vector<double>{def});
    }
    std::vector<std::size_t> idx(axes.size(), 0);
    for (;;) {
      Job j{&e, {}};
      for (std::size_t a = 0; a < axes.size(); ++a) j.params.emplace_back(e.defaults[a].first, axes[a][idx[a]]);
      if (const std::string rule = e.check(j.params, ctx); !rule.empty())
        throw ConfigError(name + " (" + params_text(j.params) + ", dim=" + std::to_string(ctx.dim) +
                          "): admissibility rule violated: " + rule);
      jobs.push_back(std::move(j));
      // last axis fastest
      std::size_t a = axes.size();
      while (a > 0 && ++idx[a - 1] == axes[a - 1].size()) idx[--a] = 0;
      if (a == 0) break;
    }
  }
  return jobs;
}

using ordered_json = nlohmann::ordered_json;

std::string series_label(const Outcome& o) {
  const std::string p = params_text(o.params);
  return p.empty() ? o.name : o.name + " " + p;
}

std::string trend_svg(const std::vector<const Outcome*>& rows) {
  std::vector<plot::LinePanel> panels;
  plot::LinePanel trend{"empirical constant under refinement", "N", "constant", true, true, {}};
  plot::LinePanel energy{"per-scale energy t^{-2 beta} ||f * phi_t||^2", "t", "energy", true, true, {}};
  plot::LinePanel plain{"constant per job", "job", "constant", false, false, {}};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Outcome& o = *rows[i];
    if (!o.sizes.empty() && o.sizes.size() == o.trend.size()) {
      plot::Series s{series_label(o), {}, o.trend};
      for (int n : o.sizes) s.x.push_back(n);
      trend.series.push_back(std::move(s));
    } else {
      if (plain.series.empty()) plain.series.push_back({"constant", {}, {}});
      plain.series[0].x.push_back(static_cast<double>(i));
      plain.series[0].y.push_back(o.constant);
    }
    if (!o.energy.empty()) energy.series.push_back({series_label(o), o.energy_t, o.energy});
  }
  if (!trend.series.empty()) panels.push_back(std::move(trend));
  if (!plain.series.empty()) panels.push_back(std::move(plain));
  if (!energy.series.empty()) panels.push_back(std::move(energy));
  return plot::render(panels);
}

double param_of(const Outcome& o, const std::string& key) {
  for (const auto& [k, v] : o.params)
    if (k == key) return v;
  return NAN;
}

// Fitted exponent over (1/p, 1/q), one map per (alpha, beta) group, with the
// boundary line 1/q = (beta - d/(2p)) / ((alpha - 1) d / 2) when beta is fixed.
std::string region_svg(const std::vector<const Outcome*>& rows, int dim) {
  std::vector<std::pair<std::pair<double, double>, std::vector<const Outcome*>>> groups;
  for (const Outcome* o : rows) {
    // a NaN beta (on the sharp line) groups with other NaNs
    const double a = param_of(*o, "alpha"), b = param_of(*o, "beta");
    auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) {
      return g.first.first == a && (g.first.second == b || (std::isnan(b) && std::isnan(g.first.second)));
    });
    if (it == groups.end()) groups.push_back({{a, b}, {o}});
    else it->second.push_back(o);
  }
  std::vector<plot::Heatmap> maps;
  for (const auto& [key, members] : groups) {
    const auto [alpha, beta] = key;
    std::set<double> xs, ys;
    for (const Outcome* o : members) {
      xs.insert(1.0 / param_of(*o, "p"));
      ys.insert(1.0 / param_of(*o, "q"));
    }
    plot::Heatmap m;
    m.title = "fitted growth exponent, alpha=" + fmt(alpha) + (std::isnan(beta) ? ", beta on the sharp line" : ", beta=" + fmt(beta));
    m.xlabel = "1/p";
    m.ylabel = "1/q";
    m.value_label = "exponent";
    m.x.assign(xs.begin(), xs.end());
    m.y.assign(ys.begin(), ys.end());
    m.values.assign(m.x.size() * m.y.size(), NAN);
    for (const Outcome* o : members) {
      const auto i = std::find(m.x.begin(), m.x.end(), 1.0 / param_of(*o, "p")) - m.x.begin();
      const auto j = std::find(m.y.begin(), m.y.end(), 1.0 / param_of(*o, "q")) - m.y.begin();
      m.values[j * m.x.size() + i] = o->fitted_exponent;
    }
    if (std::isfinite(beta) && alpha != 1.0) {
      m.overlay.label = "boundary";
      for (int k = 0; k <= 20; ++k) {
        const double ip = k / 20.0;
        m.overlay.x.push_back(ip);
        m.overlay.y.push_back((beta - dim * ip / 2.0) / ((alpha - 1.0) * dim / 2.0));
      }
    }
    maps.push_back(std::move(m));
  }
  return plot::render(maps);
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace

RunResult run_experiments(const ExperimentConfig& cfg, std::ostream* log) {
  RunContext ctx;
  ctx.dim = cfg.dim;
  ctx.sizes = cfg.sizes;
  ctx.length = cfg.length;
  ctx.seed = cfg.seed;
  if (auto it = cfg.grid.find("s"); it != cfg.grid.end()) ctx.s_grid = it->second;
  const std::vector<Job> jobs = expand(cfg, ctx);

  std::vector<std::vector<Outcome>> results(jobs.size());
  std::vector<std::string> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mu;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) {
      const Job& j = jobs[i];
      try {
        results[i] = j.entry->run(j.params, ctx);
        for (auto& o : results[i]) {
          o.test = j.entry->name;
          if (o.tag.empty()) o.tag = j.entry->tag;
        }
      } catch (const std::exception& e) {
        errors[i] = j.entry->name + " (" + params_text(j.params) + "): " + e.what();
      }
      if (log) {
        std::lock_guard lock(log_mu);
        *log << "[" << i + 1 << "/" << jobs.size() << "] " << j.entry->name << " " << params_text(j.params)
             << (errors[i].empty() ? "" : " failed") << "\n";
        for (const auto& o : results[i]) *log << "    " << o.name << " " << fmt(o.constant) << " " << o.verdict << "\n";
        log->flush();
      }
    }
  };
  const int nthreads = std::max(1, std::min<int>(cfg.workers, static_cast<int>(jobs.size())));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (!e.empty()) throw ConfigError(e);

  // Collector: every artifact is written here, in job order.
  RunResult res;
  for (auto& r : results)
    for (auto& o : r) res.outcomes.push_back(std::move(o));
  res.status = exit_status(res.outcomes);

  const std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);
  std::string csv = Outcome::csv_header() + "\n";
  for (const auto& o : res.outcomes) csv += o.csv_row() + "\n";
  write_file(dir / "summary.csv", csv);

  std::vector<std::string> order;
  for (const auto& name : cfg.tests)
    if (std::find(order.begin(), order.end(), name) == order.end()) order.push_back(name);
  for (const auto& name : order) {
    std::vector<const Outcome*> rows;
    for (const auto& o : res.outcomes)
      if (o.test == name) rows.push_back(&o);
    ordered_json arr = ordered_json::array();
    for (const Outcome* o : rows) arr.push_back(ordered_json::parse(o->json));
    write_file(dir / ("report-" + name + ".json"), arr.dump(2) + "\n");
    write_file(dir / ("plot-" + name + ".svg"), name == "region_scan" ? region_svg(rows, cfg.dim) : trend_svg(rows));
  }
  return res;
}

}  // namespace subdyadic
