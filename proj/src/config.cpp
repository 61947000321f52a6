#include "delayvar/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace delayvar {

namespace {

struct Entry {
  std::string value;
  int line;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

class Reader {
 public:
  Reader(std::string source, std::map<std::string, Entry> entries)
      : source_(std::move(source)), entries_(std::move(entries)) {}

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    auto it = entries_.find(key);
    std::ostringstream os;
    os << source_ << ":";
    if (it != entries_.end()) os << it->second.line << ":";
    os << " " << key << ": " << what;
    throw ConfigError(os.str());
  }

  bool has(const std::string& key) const { return entries_.count(key) > 0; }
  const std::string& raw(const std::string& key) const { return entries_.at(key).value; }

  double number(const std::string& key, double fallback) {
    used_.push_back(key);
    if (!has(key)) return fallback;
    return parse_number(key, raw(key));
  }

  long long integer(const std::string& key, long long fallback) {
    used_.push_back(key);
    if (!has(key)) return fallback;
    const std::string& s = raw(key);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) fail(key, "expected an integer, got '" + s + "'");
    return v;
  }

  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
    used_.push_back(key);
    if (!has(key)) return fallback;
    const std::string& s = raw(key);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) fail(key, "expected an unsigned integer, got '" + s + "'");
    return v;
  }

  std::string text(const std::string& key, const std::string& fallback) {
    used_.push_back(key);
    return has(key) ? raw(key) : fallback;
  }

  std::vector<double> list(const std::string& key) {
    used_.push_back(key);
    std::vector<double> out;
    if (!has(key)) return out;
    std::string s = raw(key);
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(parse_number(key, tok));
    if (out.empty()) fail(key, "expected at least one number");
    return out;
  }

  /// A vector of length n; a single number is broadcast.
  Vector vector(const std::string& key, Eigen::Index n, double fallback) {
    if (!has(key)) {
      used_.push_back(key);
      return Vector::Constant(n, fallback);
    }
    const auto v = list(key);
    if (v.size() == 1) return Vector::Constant(n, v[0]);
    if (static_cast<Eigen::Index>(v.size()) != n) {
      fail(key, "expected 1 or " + std::to_string(n) + " numbers, got " + std::to_string(v.size()));
    }
    return Eigen::Map<const Vector>(v.data(), n);
  }

  void mark(const std::string& key) { used_.push_back(key); }

  /// Rejects keys that no reader asked for.
  void check_unused() const {
    for (const auto& [key, e] : entries_) {
      if (std::find(used_.begin(), used_.end(), key) == used_.end()) fail(key, "unknown key");
    }
  }

  const std::map<std::string, Entry>& entries() const { return entries_; }

 private:
  double parse_number(const std::string& key, const std::string& s) const {
    try {
      std::size_t pos = 0;
      const double v = std::stod(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      fail(key, "expected a number, got '" + s + "'");
    }
  }

  std::string source_;
  std::map<std::string, Entry> entries_;
  std::vector<std::string> used_;
};

Metric parse_metric(Reader& rd) {
  const std::string m = rd.text("solver.metric", "h1");
  if (m == "h1") return Metric::H1;
  if (m == "l2") return Metric::L2;
  rd.fail("solver.metric", "expected 'h1' or 'l2', got '" + m + "'");
}

}  // namespace

RunConfig parse_config(std::istream& in, const std::string& source) {
  std::map<std::string, Entry> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(lineno) + ": expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(source + ":" + std::to_string(lineno) + ": missing key before '='");
    if (value.empty()) throw ConfigError(source + ":" + std::to_string(lineno) + ": missing value for " + key);
    if (entries.count(key)) {
      throw ConfigError(source + ":" + std::to_string(lineno) + ": duplicate key " + key + " (first on line " +
                        std::to_string(entries[key].line) + ")");
    }
    entries[key] = {value, lineno};
  }

  Reader rd(source, entries);
  RunConfig cfg;
  cfg.problem = rd.text("problem.name", cfg.problem);
  cfg.n = rd.integer("problem.n", 1);
  cfg.r = rd.number("problem.r", cfg.r);
  cfg.T = rd.number("problem.T", cfg.T);
  if (cfg.n < 1) rd.fail("problem.n", "must be at least 1");
  if (!(cfg.T > 0.0)) rd.fail("problem.T", "must be positive");
  if (!(cfg.r > 0.0)) rd.fail("problem.r", "must be positive");
  if (!(cfg.r < cfg.T)) {
    rd.fail("problem.r", "the delay must satisfy r < T (got r = " + rd.text("problem.r", "") + ", T = " +
                             std::to_string(cfg.T) + ")");
  }

  const auto names = builtin_names();
  if (std::find(names.begin(), names.end(), cfg.problem) == names.end()) {
    rd.fail("problem.name", "unknown problem '" + cfg.problem + "'");
  }
  for (const auto& key : builtin_coefficient_keys(cfg.problem)) {
    const std::string full = "problem." + key;
    if (rd.has(full)) cfg.coefficients[key] = rd.number(full, 0.0);
  }
  for (const auto& [key, e] : rd.entries()) {
    if (key.rfind("problem.", 0) == 0 && key != "problem.name" && key != "problem.n" && key != "problem.r" &&
        key != "problem.T" && !cfg.coefficients.count(key.substr(8))) {
      rd.fail(key, "not a coefficient of " + cfg.problem);
    }
  }
  try {
    coefficients_from_map(cfg.problem, cfg.coefficients);
  } catch (const std::invalid_argument& e) {
    rd.fail("problem.name", e.what());
  }

  auto& h = cfg.history;
  h.kind = rd.text("history.kind", h.kind);
  if (h.kind == "constant") {
    h.value = rd.vector("history.value", cfg.n, 0.0);
  } else if (h.kind == "linear") {
    h.offset = rd.vector("history.offset", cfg.n, 0.0);
    h.slope = rd.vector("history.slope", cfg.n, 0.0);
  } else if (h.kind == "sinusoid") {
    h.offset = rd.vector("history.offset", cfg.n, 0.0);
    h.amplitude = rd.vector("history.amplitude", cfg.n, 1.0);
    h.frequency = rd.number("history.frequency", h.frequency);
    h.phase = rd.number("history.phase", h.phase);
  } else if (h.kind == "samples") {
    if (!rd.has("history.file")) rd.fail("history.kind", "samples history needs history.file");
    h.file = rd.text("history.file", "");
  } else {
    rd.fail("history.kind", "expected constant, linear, sinusoid or samples, got '" + h.kind + "'");
  }

  if (!rd.has("endpoint.zeta")) throw ConfigError(source + ": endpoint.zeta is required");
  cfg.zeta = rd.vector("endpoint.zeta", cfg.n, 0.0);

  auto& s = cfg.solver;
  s.N = static_cast<int>(rd.integer("solver.N", s.N));
  s.max_iters = static_cast<int>(rd.integer("solver.max_iters", s.max_iters));
  s.grad_tol = rd.number("solver.grad_tol", s.grad_tol);
  s.armijo = rd.number("solver.armijo", s.armijo);
  s.backtrack = rd.number("solver.backtrack", s.backtrack);
  s.initial_step = rd.number("solver.initial_step", s.initial_step);
  s.seed = rd.unsigned_integer("solver.seed", s.seed);
  s.subsamples = static_cast<int>(rd.integer("solver.subsamples", s.subsamples));
  s.metric = parse_metric(rd);
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(source + ": " + e.what());
  }

  cfg.verify_threshold = rd.number("verify.threshold", cfg.verify_threshold);
  if (!(cfg.verify_threshold > 0.0)) rd.fail("verify.threshold", "must be positive");

  auto& id = cfg.identity;
  id.seed = rd.unsigned_integer("identity.seed", id.seed);
  id.fubini_cases = static_cast<int>(rd.integer("identity.fubini_cases", id.fubini_cases));
  id.pairing_cases = static_cast<int>(rd.integer("identity.pairing_cases", id.pairing_cases));
  id.ibp_cases = static_cast<int>(rd.integer("identity.ibp_cases", id.ibp_cases));
  for (const char* key : {"identity.fubini_cases", "identity.pairing_cases", "identity.ibp_cases"}) {
    if (rd.has(key) && rd.integer(key, 0) < 0) rd.fail(key, "must be non-negative");
  }

  if (rd.has("converge.levels")) {
    cfg.levels.clear();
    for (double v : rd.list("converge.levels")) {
      if (v != std::floor(v) || v < 2) rd.fail("converge.levels", "grid levels must be integers >= 2");
      cfg.levels.push_back(static_cast<int>(v));
    }
  }
  cfg.output_dir = rd.text("output.dir", cfg.output_dir.string());

  rd.check_unused();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open configuration file");
  RunConfig cfg = parse_config(in, path.string());
  const auto base = path.parent_path();
  if (!cfg.history.file.empty() && cfg.history.file.is_relative()) cfg.history.file = base / cfg.history.file;
  if (cfg.output_dir.is_relative()) cfg.output_dir = base / cfg.output_dir;
  return cfg;
}

std::unique_ptr<DelayLagrangian> make_problem(const RunConfig& cfg) {
  return make_builtin(cfg.problem, cfg.n, cfg.r, cfg.T, coefficients_from_map(cfg.problem, cfg.coefficients));
}

HistoryFunction make_history(const RunConfig& cfg) {
  const auto& h = cfg.history;
  if (h.kind == "constant") return HistoryFunction::constant(h.value, cfg.r);
  if (h.kind == "linear") return HistoryFunction::linear(h.offset, h.slope, cfg.r);
  if (h.kind == "sinusoid") return HistoryFunction::sinusoid(h.offset, h.amplitude, h.frequency, h.phase, cfg.r);

  std::ifstream in(h.file);
  if (!in) throw ConfigError(h.file.string() + ": cannot open history sample file");
  std::vector<Vector> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream is(line);
    std::vector<double> vals;
    std::string tok;
    while (is >> tok) {
      try {
        std::size_t pos = 0;
        vals.push_back(std::stod(tok, &pos));
        if (pos != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw ConfigError(h.file.string() + ":" + std::to_string(lineno) + ": expected a number, got '" + tok + "'");
      }
    }
    if (vals.empty()) continue;
    if (static_cast<Eigen::Index>(vals.size()) != cfg.n) {
      throw ConfigError(h.file.string() + ":" + std::to_string(lineno) + ": expected " + std::to_string(cfg.n) +
                        " values per row");
    }
    rows.push_back(Eigen::Map<const Vector>(vals.data(), cfg.n));
  }
  if (rows.size() < 2) throw ConfigError(h.file.string() + ": need at least two history samples");
  Eigen::MatrixXd samples(cfg.n, static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) samples.col(static_cast<Eigen::Index>(i)) = rows[i];
  return HistoryFunction::sampled(cfg.r, std::move(samples));
}

}  // namespace delayvar
