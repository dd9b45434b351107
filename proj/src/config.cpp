#include "rsoc/config.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "rsoc/errors.hpp"

namespace rsoc {

Command parse_command(const std::string& name) {
  static const std::pair<const char*, Command> table[] = {
      {"simulate", Command::simulate},         {"solve-discounted", Command::solve_discounted},
      {"solve-ergodic", Command::solve_ergodic}, {"probe-recurrence", Command::probe_recurrence},
      {"verify", Command::verify},             {"suite", Command::suite}};
  for (const auto& [n, c] : table)
    if (name == n) return c;
  throw ValidationError("unknown command '" + name + "'");
}

const char* to_string(Command c) noexcept {
  switch (c) {
    case Command::simulate:
      return "simulate";
    case Command::solve_discounted:
      return "solve-discounted";
    case Command::solve_ergodic:
      return "solve-ergodic";
    case Command::probe_recurrence:
      return "probe-recurrence";
    case Command::verify:
      return "verify";
    case Command::suite:
      break;
  }
  return "suite";
}

namespace {

using boost::property_tree::ptree;

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"model",
       {"dim", "box_side", "step", "actions", "drift_kind", "drift", "sigma", "gamma", "gamma_dir", "cost",
        "cost_slope", "cost_cap", "cost_value", "action_cost", "cost_cutoff", "ellipticity", "reflection_margin",
        "theta", "alpha", "kappa", "x0"}},
      {"numerics",
       {"dtheta", "max_slices", "dt", "horizon", "n_paths", "alphas", "ks", "ergodic_horizons", "ergodic_paths",
        "radii", "target_center", "target_radius", "query", "eps_rec", "t_cap", "checkpoints", "dpp_exit_side",
        "dpp_t_cap", "mc_kappa"}},
      {"run", {"seed", "policy", "policy_weights", "compare_policies", "write_paths"}},
  };
  return keys;
}

[[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& what) {
  throw ConfigError("[" + section + "] " + key + ": " + what);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& section, const std::string& key, std::string tok) {
  tok = trim(tok);
  if (!tok.empty() && tok[0] == '+') tok.erase(0, 1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty() || !std::isfinite(v))
    fail(section, key, "'" + tok + "' is not a finite number");
  return v;
}

std::vector<std::string> split(const std::string& s, const std::string& seps) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (seps.find(c) != std::string::npos) {
      if (!trim(cur).empty()) out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty()) out.push_back(trim(cur));
  return out;
}

class Section {
 public:
  Section(std::string name, const ptree* tree) : name_(std::move(name)), tree_(tree) {}

  std::optional<std::string> raw(const std::string& key) const {
    if (!tree_) return std::nullopt;
    const auto v = tree_->get_optional<std::string>(key);
    if (!v) return std::nullopt;
    return trim(*v);
  }
  double number(const std::string& key, double def) const {
    const auto v = raw(key);
    return v ? to_double(name_, key, *v) : def;
  }
  std::optional<double> opt_number(const std::string& key) const {
    const auto v = raw(key);
    if (!v) return std::nullopt;
    return to_double(name_, key, *v);
  }
  std::size_t count(const std::string& key, std::size_t def) const {
    const auto v = raw(key);
    if (!v) return def;
    const double d = to_double(name_, key, *v);
    if (d < 0.0 || d != std::floor(d)) fail(name_, key, "must be a nonnegative integer");
    return static_cast<std::size_t>(d);
  }
  std::vector<double> list(const std::string& key, std::vector<double> def) const {
    const auto v = raw(key);
    if (!v) return def;
    std::vector<double> out;
    for (const std::string& t : split(*v, ", \t")) out.push_back(to_double(name_, key, t));
    return out;
  }
  std::vector<std::vector<double>> lists(const std::string& key) const {
    std::vector<std::vector<double>> out;
    const auto v = raw(key);
    if (!v) return out;
    for (const std::string& part : split(*v, ";")) {
      std::vector<double> row;
      for (const std::string& t : split(part, ", \t")) row.push_back(to_double(name_, key, t));
      out.push_back(row);
    }
    return out;
  }
  std::string text(const std::string& key, const std::string& def) const { return raw(key).value_or(def); }
  const std::string& name() const { return name_; }

 private:
  std::string name_;
  const ptree* tree_;
};

Vec to_vec(const Section& s, const std::string& key, const std::vector<double>& v, int d) {
  if (static_cast<int>(v.size()) != d) {
    std::ostringstream os;
    os << "expected " << d << " components, got " << v.size();
    fail(s.name(), key, os.str());
  }
  Vec out(d);
  for (int i = 0; i < d; ++i) out[i] = v[static_cast<std::size_t>(i)];
  return out;
}

void require(bool ok, const Section& s, const std::string& key, const std::string& what) {
  if (!ok) fail(s.name(), key, what);
}

bool strictly_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) return false;
  return true;
}

ModelSpec build_model(const Section& m) {
  ModelSpec spec;
  const std::size_t dim = m.count("dim", 1);
  require(dim >= 1 && static_cast<int>(dim) <= kMaxDim, m, "dim", "must be in [1, 3]");
  const int d = static_cast<int>(dim);
  spec.domain.dim = d;
  spec.domain.box_side = m.number("box_side", 8.0);
  spec.domain.step = m.number("step", 0.0625);
  require(spec.domain.box_side > 0.0, m, "box_side", "must be > 0");
  require(spec.domain.step > 0.0, m, "step", "must be > 0");
  try {
    spec.domain.validate();
  } catch (const Error& e) {
    fail(m.name(), "step", e.what());
  }

  std::vector<std::vector<double>> drift = m.lists("drift");
  if (drift.empty()) drift = {std::vector<double>(dim, -1.0), std::vector<double>(dim, 1.0)};
  DriftModel dm;
  const std::string dk = m.text("drift_kind", "constant");
  require(dk == "constant" || dk == "linear", m, "drift_kind", "must be 'constant' or 'linear'");
  dm.kind = dk == "constant" ? DriftKind::constant : DriftKind::linear;
  for (const auto& row : drift) dm.per_action.push_back(to_vec(m, "drift", row, d));

  std::vector<std::string> labels;
  if (const auto a = m.raw("actions")) labels = split(*a, ", \t");
  if (labels.empty())
    for (std::size_t i = 0; i < drift.size(); ++i) labels.push_back("s" + std::to_string(i));
  require(labels.size() == drift.size(), m, "actions", "needs one label per drift entry");
  spec.actions = ActionSpace(labels);

  const std::vector<double> sig = m.list("sigma", {1.0});
  Mat sigma(d);
  if (sig.size() == 1) {
    for (int i = 0; i < d; ++i) sigma(i, i) = sig[0];
  } else if (sig.size() == dim) {
    for (int i = 0; i < d; ++i) sigma(i, i) = sig[static_cast<std::size_t>(i)];
  } else if (sig.size() == dim * dim) {
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) sigma(i, j) = sig[static_cast<std::size_t>(i * d + j)];
  } else {
    fail(m.name(), "sigma", "expected 1, d or d*d entries");
  }

  const std::string gk = m.text("gamma", "normal");
  require(gk == "normal" || gk == "constant", m, "gamma", "must be 'normal' or 'constant'");
  Vec gdir(d, 1.0);
  if (gk == "constant") {
    require(m.raw("gamma_dir").has_value(), m, "gamma_dir", "required when gamma = constant");
    gdir = to_vec(m, "gamma_dir", m.list("gamma_dir", {}), d);
    require(norm(gdir) > 0.0, m, "gamma_dir", "must be nonzero");
  }

  CostModel cm;
  const std::string ck = m.text("cost", "ramp");
  require(ck == "ramp" || ck == "constant", m, "cost", "must be 'ramp' or 'constant'");
  cm.kind = ck == "ramp" ? CostKind::ramp : CostKind::constant;
  cm.slope = m.number("cost_slope", 1.0);
  cm.cap = m.number("cost_cap", 2.0);
  cm.value = m.number("cost_value", 0.0);
  require(cm.slope >= 0.0, m, "cost_slope", "must be >= 0");
  require(cm.cap >= 0.0, m, "cost_cap", "must be >= 0");
  require(cm.value >= 0.0, m, "cost_value", "must be >= 0 (costs are nonnegative)");
  cm.action_cost = m.list("action_cost", std::vector<double>(drift.size(), 0.0));
  require(cm.action_cost.size() == drift.size(), m, "action_cost", "needs one entry per action");
  for (double c : cm.action_cost) require(c >= 0.0, m, "action_cost", "entries must be >= 0");
  if (const auto k = m.opt_number("cost_cutoff")) {
    require(*k > 0.0, m, "cost_cutoff", "must be > 0");
    cm.cutoff = *k;
  }

  const double delta = m.number("ellipticity", 0.5);
  const double eta = m.number("reflection_margin", 0.5);
  require(delta > 0.0, m, "ellipticity", "must be > 0");
  require(eta > 0.0, m, "reflection_margin", "must be > 0");
  spec.coeffs = CoefficientField(d, dm, sigma, gk == "normal" ? GammaKind::normal : GammaKind::constant, gdir, cm,
                                 delta, eta);

  spec.theta = m.number("theta", 1.0);
  spec.alpha = m.number("alpha", 1.0);
  spec.kappa = m.number("kappa", 0.05);
  require(spec.theta > 0.0 && spec.theta <= 1.0, m, "theta", "must be in (0, 1]");
  require(spec.alpha > 0.0, m, "alpha", "must be > 0");
  require(spec.kappa > 0.0, m, "kappa", "must be > 0");
  require(spec.kappa < spec.theta, m, "kappa", "kappa < theta violated");
  const Grid grid(spec.domain);
  Vec x0 = m.raw("x0") ? to_vec(m, "x0", m.list("x0", {}), d) : Vec(d, spec.domain.box_side / 4.0);
  const std::size_t idx = grid.nearest(x0);
  require(grid.is_interior(idx), m, "x0", "must snap to an interior grid node");
  spec.x0 = grid.coord(idx);
  return spec;
}

Numerics build_numerics(const Section& s, int d) {
  Numerics n;
  n.dtheta = s.number("dtheta", n.dtheta);
  require(n.dtheta >= 0.0, s, "dtheta", "must be >= 0 (0 selects the step automatically)");
  n.max_slices = s.count("max_slices", n.max_slices);
  require(n.max_slices >= 3, s, "max_slices", "must be >= 3");
  n.dt = s.number("dt", n.dt);
  require(n.dt > 0.0, s, "dt", "must be > 0");
  n.horizon = s.number("horizon", n.horizon);
  require(n.horizon >= n.dt, s, "horizon", "must be >= dt");
  n.n_paths = s.count("n_paths", n.n_paths);
  require(n.n_paths >= 2, s, "n_paths", "must be >= 2");
  n.alphas = s.list("alphas", n.alphas);
  require(!n.alphas.empty() && n.alphas.front() > 0.0, s, "alphas", "must be nonempty and positive");
  for (std::size_t i = 1; i < n.alphas.size(); ++i)
    require(n.alphas[i] > 0.0 && n.alphas[i] < n.alphas[i - 1], s, "alphas", "must be positive and decreasing");
  n.ks = s.list("ks", n.ks);
  require(!n.ks.empty() && n.ks.front() > 0.0 && strictly_increasing(n.ks), s, "ks", "must be positive and increasing");
  n.ergodic_horizons = s.list("ergodic_horizons", n.ergodic_horizons);
  require(n.ergodic_horizons.size() >= 3 && n.ergodic_horizons.front() > 0.0 && strictly_increasing(n.ergodic_horizons),
          s, "ergodic_horizons", "needs at least 3 positive increasing horizons");
  n.ergodic_paths = s.count("ergodic_paths", n.ergodic_paths);
  require(n.ergodic_paths >= 16, s, "ergodic_paths", "must be >= 16");
  n.radii = s.list("radii", {});
  require(n.radii.empty() || (n.radii.size() >= 3 && strictly_increasing(n.radii)), s, "radii",
          "needs at least 3 increasing radii");
  if (s.raw("target_center")) n.target_center = to_vec(s, "target_center", s.list("target_center", {}), d);
  n.target_radius = s.opt_number("target_radius");
  if (n.target_radius) require(*n.target_radius > 0.0, s, "target_radius", "must be > 0");
  if (s.raw("query")) n.query = to_vec(s, "query", s.list("query", {}), d);
  n.eps_rec = s.number("eps_rec", n.eps_rec);
  require(n.eps_rec > 0.0 && n.eps_rec < 0.1, s, "eps_rec", "must be in (0, 0.1)");
  n.t_cap = s.number("t_cap", n.t_cap);
  require(n.t_cap > 0.0, s, "t_cap", "must be > 0");
  n.checkpoints = s.list("checkpoints", n.checkpoints);
  require(!n.checkpoints.empty() && n.checkpoints.front() > 0.0 && strictly_increasing(n.checkpoints), s,
          "checkpoints", "must be positive and increasing");
  n.dpp_exit_side = s.number("dpp_exit_side", n.dpp_exit_side);
  require(n.dpp_exit_side > 0.0, s, "dpp_exit_side", "must be > 0");
  n.dpp_t_cap = s.number("dpp_t_cap", n.dpp_t_cap);
  require(n.dpp_t_cap > 0.0, s, "dpp_t_cap", "must be > 0");
  n.mc_kappa = s.number("mc_kappa", n.mc_kappa);
  require(n.mc_kappa > 0.0 && n.mc_kappa < 1.0, s, "mc_kappa", "must be in (0, 1)");
  return n;
}

RunOptions build_run(const Section& s, int num_actions) {
  RunOptions r;
  if (const auto v = s.raw("seed")) {
    std::uint64_t seed = 0;
    const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), seed);
    require(ec == std::errc() && ptr == v->data() + v->size(), s, "seed", "must be an unsigned 64-bit integer");
    r.seed = seed;
  }
  r.policy = s.text("policy", "optimal");
  require(r.policy == "optimal" || r.policy == "constant", s, "policy", "must be 'optimal' or 'constant'");
  auto check_weights = [&](const std::vector<double>& w, const std::string& key) {
    require(static_cast<int>(w.size()) == num_actions, s, key, "needs one weight per action");
    double sum = 0.0;
    for (double x : w) {
      require(x >= 0.0, s, key, "weights must be >= 0");
      sum += x;
    }
    require(std::abs(sum - 1.0) <= 1e-12, s, key, "weights must sum to 1");
  };
  r.policy_weights = s.list("policy_weights", {});
  if (r.policy == "constant") {
    require(!r.policy_weights.empty(), s, "policy_weights", "required when policy = constant");
    check_weights(r.policy_weights, "policy_weights");
  }
  r.compare_policies = s.lists("compare_policies");
  for (const auto& w : r.compare_policies) check_weights(w, "compare_policies");
  const std::string wp = s.text("write_paths", "true");
  require(wp == "true" || wp == "false", s, "write_paths", "must be true or false");
  r.write_paths = wp == "true";
  return r;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& origin) {
  ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    std::ostringstream os;
    os << origin << ":" << e.line() << ": " << e.message();
    throw ConfigError(os.str());
  }
  RunConfig cfg;
  cfg.source_text = text;
  const auto& allowed = allowed_keys();
  for (const auto& [sec, sub] : tree) {
    const auto it = allowed.find(sec);
    if (it == allowed.end()) {
      if (sub.empty()) throw ConfigError("key '" + sec + "' outside any section");
      throw ConfigError("unknown section [" + sec + "]");
    }
    for (const auto& [key, val] : sub) {
      if (!it->second.count(key)) throw ConfigError("[" + sec + "] " + key + ": unknown key");
      cfg.echo[sec][key] = trim(val.data());
    }
  }
  auto section = [&](const std::string& name) {
    const auto child = tree.get_child_optional(name);
    return Section(name, child ? &*child : nullptr);
  };
  cfg.model = build_model(section("model"));
  cfg.numerics = build_numerics(section("numerics"), cfg.model.domain.dim);
  cfg.run = build_run(section("run"), cfg.model.actions.size());
  cfg.model.seed = cfg.run.seed;
  cfg.model.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

}  // namespace rsoc
