#include "rsoc/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "rsoc/errors.hpp"

namespace rsoc::io {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw std::runtime_error("rename " + tmp.string() + " -> " + path.string() + ": " + ec.message());
}

void write_json(const std::filesystem::path& path, const json& j) { write_atomic(path, j.dump(2) + "\n"); }

std::string value_field_csv(const ValueField& f) {
  std::ostringstream os;
  const Grid g = f.grid();
  const int d = f.domain.dim;
  os << "# schema_version=" << kSchemaVersion << "\n";
  os << "# d=" << d << " L=" << fmt(f.domain.box_side) << " h=" << fmt(f.domain.step) << " alpha=" << fmt(f.alpha)
     << " kappa=" << fmt(f.kappa) << " k=" << (f.cost_cutoff ? fmt(*f.cost_cutoff) : std::string("none"))
     << " cost_sup=" << fmt(f.cost_sup) << " x0_index=" << f.x0_index << " dtau=" << fmt(f.dtau)
     << " steps=" << f.steps << " slices=" << f.size() << "\n";
  os << "# theta_grid=";
  for (std::size_t j = 0; j < f.size(); ++j) os << (j ? "," : "") << fmt(f.slices[j].theta);
  os << "\n";
  os << "slice,theta,log_scale,node";
  for (int i = 1; i <= d; ++i) os << ",x_" << i;
  os << ",w\n";
  for (std::size_t j = 0; j < f.size(); ++j) {
    const ValueSlice& s = f.slices[j];
    const std::string head = std::to_string(j) + "," + fmt(s.theta) + "," + fmt(s.log_scale) + ",";
    for (std::size_t p = 0; p < s.w.size(); ++p) {
      os << head << p;
      const Vec x = g.coord(p);
      for (int i = 0; i < d; ++i) os << "," << fmt(x[i]);
      os << "," << fmt(s.w[p]) << "\n";
    }
  }
  return os.str();
}

namespace {

std::map<std::string, std::string> header_fields(const std::string& line) {
  std::map<std::string, std::string> out;
  std::istringstream in(line.substr(1));
  std::string tok;
  while (in >> tok) {
    const auto eq = tok.find('=');
    if (eq != std::string::npos) out[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return out;
}

double num(const std::map<std::string, std::string>& h, const std::string& key) {
  const auto it = h.find(key);
  if (it == h.end()) throw ValidationError("value field CSV header lacks '" + key + "'");
  return std::stod(it->second);
}

}  // namespace

ValueField read_value_field_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::map<std::string, std::string> h;
  ValueField f;
  bool columns = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      for (auto& [k, v] : header_fields(line)) h[k] = v;
      continue;
    }
    if (!columns) {
      columns = true;
      f.domain.dim = static_cast<int>(num(h, "d"));
      f.domain.box_side = num(h, "L");
      f.domain.step = num(h, "h");
      f.domain.validate();
      f.alpha = num(h, "alpha");
      f.kappa = num(h, "kappa");
      if (h.at("k") != "none") f.cost_cutoff = std::stod(h.at("k"));
      f.cost_sup = num(h, "cost_sup");
      f.x0_index = static_cast<std::size_t>(num(h, "x0_index"));
      f.dtau = num(h, "dtau");
      f.steps = static_cast<long>(num(h, "steps"));
      f.slices.resize(static_cast<std::size_t>(num(h, "slices")));
      continue;
    }
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != static_cast<std::size_t>(5 + f.domain.dim))
      throw ValidationError("malformed value field row: " + line);
    const std::size_t j = std::stoul(cells[0]);
    if (j >= f.slices.size()) throw ValidationError("slice index out of range: " + line);
    ValueSlice& s = f.slices[j];
    s.theta = std::stod(cells[1]);
    s.log_scale = std::stod(cells[2]);
    s.w.push_back(std::stod(cells.back()));
  }
  const std::size_t n = f.grid().size();
  for (const ValueSlice& s : f.slices)
    if (s.w.size() != n) throw ValidationError("value field CSV has an incomplete slice");
  return f;
}

std::string policy_csv(const Policy& p) {
  std::ostringstream os;
  const int d = p.grid().dim();
  os << "node";
  for (int i = 1; i <= d; ++i) os << ",x_" << i;
  os << ",action";
  for (int s = 1; s <= p.num_actions(); ++s) os << ",w_" << s;
  os << "\n";
  for (std::size_t q = 0; q < p.size(); ++q) {
    os << q;
    const Vec x = p.grid().coord(q);
    for (int i = 0; i < d; ++i) os << "," << fmt(x[i]);
    os << "," << p.action(q);
    for (double w : p.at(q)) os << "," << fmt(w);
    os << "\n";
  }
  return os.str();
}

std::string paths_csv(const std::vector<PathBundle>& paths) {
  std::ostringstream os;
  if (paths.empty()) return "path_id,step,t,xi\n";
  const int d = paths.front().dim;
  const int na = paths.front().num_actions;
  os << "path_id,step,t";
  for (int i = 1; i <= d; ++i) os << ",x_" << i;
  os << ",xi";
  for (int s = 1; s <= na; ++s) os << ",w_" << s;
  os << "\n";
  for (std::size_t k = 0; k < paths.size(); ++k) {
    const PathBundle& b = paths[k];
    for (int n = 0; n <= b.steps; ++n) {
      os << k << "," << n << "," << fmt(n * b.dt);
      for (int i = 0; i < d; ++i) os << "," << fmt(b.x[static_cast<std::size_t>(n * d + i)]);
      os << "," << fmt(b.xi[static_cast<std::size_t>(n)]);
      if (n < b.steps) {
        for (double w : b.weights(n)) os << "," << fmt(w);
      } else {
        for (int s = 0; s < na; ++s) os << ",";
      }
      os << "\n";
    }
  }
  return os.str();
}

json summary(Command command, const std::string& status, json results, const std::vector<std::string>& warnings) {
  return json{{"schema", "rsoc.summary"},
              {"schema_version", kSchemaVersion},
              {"command", to_string(command)},
              {"status", status},
              {"results", std::move(results)},
              {"warnings", warnings}};
}

json error_json(const std::string& kind, const std::string& message, int exit_code) {
  return json{{"schema", "rsoc.error"},
              {"schema_version", kSchemaVersion},
              {"kind", kind},
              {"message", message},
              {"exit_code", exit_code}};
}

json manifest(const RunConfig& cfg, Command command, double wall_seconds, const std::vector<std::string>& outputs) {
  json echo = json::object();
  for (const auto& [sec, kv] : cfg.echo)
    for (const auto& [k, v] : kv) echo[sec][k] = v;
  return json{{"schema", "rsoc.manifest"},
              {"schema_version", kSchemaVersion},
              {"version", RSOC_VERSION},
              {"command", to_string(command)},
              {"seed", cfg.run.seed},
              {"wall_seconds", wall_seconds},
              {"config", echo},
              {"config_file", "config.ini"},
              {"outputs", outputs}};
}

}  // namespace rsoc::io
