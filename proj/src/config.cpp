#include "psa/config.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "psa/errors.hpp"

namespace psa {

namespace {

using json = nlohmann::json;

class Reader {
 public:
  std::vector<FieldError> errors;

  void fail(const std::string& path, const std::string& message) { errors.push_back({path, message}); }

  // Object check plus rejection of keys outside `allowed`.
  bool object(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) {
      fail(path, "expected an object");
      return false;
    }
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& [k, v] : j.items()) {
      if (!keys.count(k)) fail(join(path, k), "unknown key");
    }
    return true;
  }

  std::optional<double> number(const json& parent, const std::string& path, const char* key,
                               std::optional<double> fallback = std::nullopt) {
    const std::string p = join(path, key);
    if (!parent.contains(key)) {
      if (!fallback) fail(p, "missing");
      return fallback;
    }
    const json& v = parent.at(key);
    if (!v.is_number() || !std::isfinite(v.get<double>())) {
      fail(p, "expected a finite number");
      return std::nullopt;
    }
    return v.get<double>();
  }

  std::optional<std::size_t> count(const json& parent, const std::string& path, const char* key,
                                   std::size_t fallback, std::size_t min) {
    const std::string p = join(path, key);
    if (!parent.contains(key)) return fallback;
    const json& v = parent.at(key);
    if (!v.is_number_unsigned()) {
      fail(p, "expected a non-negative integer");
      return std::nullopt;
    }
    const auto n = v.get<std::size_t>();
    if (n < min) {
      fail(p, fmt::format("must be at least {}", min));
      return std::nullopt;
    }
    return n;
  }

  std::vector<double> numbers(const json& parent, const std::string& path, const char* key) {
    const std::string p = join(path, key);
    std::vector<double> out;
    if (!parent.contains(key)) return out;
    const json& v = parent.at(key);
    if (!v.is_array()) {
      fail(p, "expected an array of numbers");
      return out;
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number() || !std::isfinite(v[i].get<double>())) {
        fail(fmt::format("{}[{}]", p, i), "expected a finite number");
      } else {
        out.push_back(v[i].get<double>());
      }
    }
    return out;
  }

  std::optional<std::string> text(const json& parent, const std::string& path, const char* key,
                                  std::optional<std::string> fallback = std::nullopt) {
    const std::string p = join(path, key);
    if (!parent.contains(key)) {
      if (!fallback) fail(p, "missing");
      return fallback;
    }
    if (!parent.at(key).is_string()) {
      fail(p, "expected a string");
      return std::nullopt;
    }
    return parent.at(key).get<std::string>();
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }
};

enum class Range { Concentration, Velocity, Any };

void check_value(Reader& r, const std::string& path, double v, Range range) {
  if (range == Range::Concentration && (v < 0.0 || v > 1.0)) {
    r.fail(path, fmt::format("concentration {} outside [0, 1]", v));
  }
  if (range == Range::Velocity && !(v > 0.0)) {
    r.fail(path, fmt::format("must be > 0 (the inlet velocity u_b(t) is positive), got {}", v));
  }
}

std::optional<Profile> read_profile(Reader& r, const json& parent, const std::string& path,
                                    const char* key, double end, Range range) {
  const std::string p = Reader::join(path, key);
  if (!parent.contains(key)) {
    r.fail(p, "missing");
    return std::nullopt;
  }
  const json& j = parent.at(key);
  if (j.is_number()) {
    const double v = j.get<double>();
    check_value(r, p, v, range);
    return Profile::make_constant(v);
  }
  if (!j.is_object() || !j.contains("type")) {
    r.fail(p, "expected a number or a profile object with a type");
    return std::nullopt;
  }
  const auto type = r.text(j, p, "type");
  if (!type) return std::nullopt;
  const std::size_t before = r.errors.size();
  Profile out;
  if (*type == "constant") {
    r.object(j, p, {"type", "value"});
    const auto v = r.number(j, p, "value");
    if (v) {
      check_value(r, p + ".value", *v, range);
      out = Profile::make_constant(*v);
    }
  } else if (*type == "ramp") {
    r.object(j, p, {"type", "from", "to", "start", "end"});
    const auto from = r.number(j, p, "from");
    const auto to = r.number(j, p, "to");
    const auto start = r.number(j, p, "start", 0.0);
    const auto stop = r.number(j, p, "end", end);
    if (from) check_value(r, p + ".from", *from, range);
    if (to) check_value(r, p + ".to", *to, range);
    if (start && stop && !(*stop > *start)) r.fail(p + ".end", "must exceed start");
    if (from && to && start && stop) out = Profile::make_ramp(*from, *to, *start, *stop);
  } else if (*type == "step") {
    r.object(j, p, {"type", "from", "to", "at"});
    const auto from = r.number(j, p, "from");
    const auto to = r.number(j, p, "to");
    const auto at = r.number(j, p, "at");
    if (from) check_value(r, p + ".from", *from, range);
    if (to) check_value(r, p + ".to", *to, range);
    if (from && to && at) out = Profile::make_step(*from, *to, *at);
  } else if (*type == "table") {
    r.object(j, p, {"type", "breaks", "values"});
    out.kind = Profile::Kind::Table;
    out.breaks = r.numbers(j, p, "breaks");
    out.values = r.numbers(j, p, "values");
    for (std::size_t i = 0; i < out.values.size(); ++i) {
      check_value(r, fmt::format("{}.values[{}]", p, i), out.values[i], range);
    }
    if (out.values.empty() || out.breaks.size() != out.values.size() + 1) {
      r.fail(p + ".breaks", "needs exactly one more entry than values");
    } else {
      for (std::size_t i = 1; i < out.breaks.size(); ++i) {
        if (!(out.breaks[i] > out.breaks[i - 1])) {
          r.fail(fmt::format("{}.breaks[{}]", p, i), "breaks must increase strictly");
        }
      }
      if (out.breaks.front() > 0.0 || out.breaks.back() < end) {
        r.fail(p + ".breaks", fmt::format("must cover [0, {}]", end));
      }
    }
  } else if (*type == "sine") {
    r.object(j, p, {"type", "mean", "amplitude", "period", "phase"});
    const auto mean = r.number(j, p, "mean");
    const auto amp = r.number(j, p, "amplitude");
    const auto period = r.number(j, p, "period");
    const auto phase = r.number(j, p, "phase", 0.0);
    if (period && !(*period > 0.0)) r.fail(p + ".period", "must be > 0");
    if (mean && amp) {
      check_value(r, p + ".mean - |amplitude|", *mean - std::abs(*amp), range);
      if (range == Range::Concentration) check_value(r, p + ".mean + |amplitude|", *mean + std::abs(*amp), range);
    }
    if (mean && amp && period && phase) out = Profile::make_sine(*mean, *amp, *period, *phase);
  } else {
    r.fail(p + ".type", fmt::format("unknown profile type '{}'", *type));
  }
  if (r.errors.size() != before) return std::nullopt;
  return out;
}

std::optional<IsothermModel> read_model(Reader& r, const json& root) {
  if (!root.contains("model")) {
    r.fail("model", "missing");
    return std::nullopt;
  }
  const json& j = root.at("model");
  if (!j.is_object()) {
    r.fail("model", "expected an object");
    return std::nullopt;
  }
  const auto type = r.text(j, "model", "type");
  if (!type) return std::nullopt;
  const std::size_t before = r.errors.size();
  auto nonneg = [&](const char* key, std::optional<double> v) {
    if (v && *v < 0.0) r.fail(Reader::join("model", key), "must be >= 0");
  };
  auto positive = [&](const char* key, std::optional<double> v) {
    if (v && !(*v > 0.0)) r.fail(Reader::join("model", key), "must be > 0");
  };
  std::optional<IsothermModel> model;
  if (*type == "linear") {
    r.object(j, "model", {"type", "k1", "k2"});
    const auto k1 = r.number(j, "model", "k1");
    const auto k2 = r.number(j, "model", "k2");
    nonneg("k1", k1);
    nonneg("k2", k2);
    if (r.errors.size() == before) model.emplace(LinearIsotherm{*k1, *k2});
  } else if (*type == "binary_langmuir") {
    r.object(j, "model", {"type", "q1", "k1", "q2", "k2"});
    const auto q1 = r.number(j, "model", "q1");
    const auto k1 = r.number(j, "model", "k1");
    const auto q2 = r.number(j, "model", "q2");
    const auto k2 = r.number(j, "model", "k2");
    positive("q1", q1);
    positive("q2", q2);
    nonneg("k1", k1);
    nonneg("k2", k2);
    if (r.errors.size() == before) model.emplace(BinaryLangmuir{*q1, *k1, *q2, *k2});
  } else if (*type == "inert_concave") {
    r.object(j, "model", {"type", "active", "capacity", "affinity"});
    const auto active = r.text(j, "model", "active", std::string("gas2"));
    const auto cap = r.number(j, "model", "capacity");
    const auto aff = r.number(j, "model", "affinity");
    positive("capacity", cap);
    positive("affinity", aff);
    if (active && *active != "gas1" && *active != "gas2") r.fail("model.active", "expected 'gas1' or 'gas2'");
    if (r.errors.size() == before) {
      model.emplace(InertPlusConcave{langmuir_isotherm(*cap, *aff), *active == "gas1"});
    }
  } else {
    r.fail("model.type", fmt::format("unknown model type '{}'", *type));
  }
  return model;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<json>", e.what());
  }
  Reader r;
  RunConfig cfg;
  if (!r.object(root, "", {"model", "data", "solver", "output", "riemann", "experiment", "seed"})) {
    throw ConfigError(r.errors);
  }

  if (auto m = read_model(r, root)) cfg.model = std::move(*m);

  if (!root.contains("data")) {
    r.fail("data", "missing");
  } else if (const json& d = root.at("data"); r.object(d, "data", {"T", "X", "c0", "cb", "ub", "min_cells"})) {
    const auto T = r.number(d, "data", "T", 1.0);
    const auto X = r.number(d, "data", "X", 1.0);
    if (T && !(*T > 0.0)) r.fail("data.T", "must be > 0");
    if (X && !(*X > 0.0)) r.fail("data.X", "must be > 0");
    if (T) cfg.data.T = *T;
    if (X) cfg.data.X = *X;
    if (auto p = read_profile(r, d, "data", "c0", cfg.data.X, Range::Concentration)) cfg.data.c0 = *p;
    if (auto p = read_profile(r, d, "data", "cb", cfg.data.T, Range::Concentration)) cfg.data.cb = *p;
    if (auto p = read_profile(r, d, "data", "ub", cfg.data.T, Range::Velocity)) cfg.data.ub = *p;
    if (auto n = r.count(d, "data", "min_cells", 16, 1)) cfg.data.min_cells = *n;
  }

  if (root.contains("solver")) {
    const json& s = root.at("solver");
    if (r.object(s, "solver", {"delta", "dt", "cfl", "dx", "nt", "nx"})) {
      const auto delta = r.number(s, "solver", "delta", cfg.solver.delta);
      const auto dt = r.number(s, "solver", "dt", cfg.solver.dt);
      const auto cfl = r.number(s, "solver", "cfl", cfg.solver.cfl);
      const auto dx = r.number(s, "solver", "dx", cfg.solver.dx);
      if (delta && !(*delta > 0.0 && *delta <= 1.0)) r.fail("solver.delta", fmt::format("{} outside (0, 1]", *delta));
      if (dt && !(*dt > 0.0)) r.fail("solver.dt", "must be > 0");
      if (cfl && !(*cfl > 0.0 && *cfl <= 1.0)) r.fail("solver.cfl", fmt::format("{} outside (0, 1]", *cfl));
      if (dx && *dx < 0.0) r.fail("solver.dx", "must be >= 0");
      if (delta) cfg.solver.delta = *delta;
      if (dt) cfg.solver.dt = *dt;
      if (cfl) cfg.solver.cfl = *cfl;
      if (dx) cfg.solver.dx = *dx;
      if (auto n = r.count(s, "solver", "nt", cfg.solver.nt, 1)) cfg.solver.nt = *n;
      if (auto n = r.count(s, "solver", "nx", cfg.solver.nx, 1)) cfg.solver.nx = *n;
    }
  }

  if (root.contains("output")) {
    const json& o = root.at("output");
    if (r.object(o, "output", {"slices_x", "slices_t", "samples"})) {
      cfg.output.slices_x = r.numbers(o, "output", "slices_x");
      cfg.output.slices_t = r.numbers(o, "output", "slices_t");
      if (auto n = r.count(o, "output", "samples", cfg.output.default_samples, 2)) cfg.output.default_samples = *n;
    }
  }
  for (std::size_t i = 0; i < cfg.output.slices_x.size(); ++i) {
    const double x = cfg.output.slices_x[i];
    if (x < 0.0 || x > cfg.data.X) r.fail(fmt::format("output.slices_x[{}]", i), fmt::format("{} outside [0, X]", x));
  }
  for (std::size_t i = 0; i < cfg.output.slices_t.size(); ++i) {
    const double t = cfg.output.slices_t[i];
    if (t < 0.0 || t > cfg.data.T) r.fail(fmt::format("output.slices_t[{}]", i), fmt::format("{} outside [0, T]", t));
  }

  if (root.contains("riemann")) {
    const json& j = root.at("riemann");
    if (r.object(j, "riemann", {"below", "above", "z"})) {
      RiemannConfig rc;
      for (const char* side : {"below", "above"}) {
        const std::string p = Reader::join("riemann", side);
        if (!j.contains(side)) {
          r.fail(p, "missing");
          continue;
        }
        const json& s = j.at(side);
        if (!r.object(s, p, {"c", "u"})) continue;
        const auto c = r.number(s, p, "c");
        const auto u = r.number(s, p, "u");
        if (c) check_value(r, p + ".c", *c, Range::Concentration);
        if (u && !(*u > 0.0)) r.fail(p + ".u", "must be > 0");
        if (c && u && *u > 0.0) (std::string(side) == "below" ? rc.below : rc.above) = State{*c, std::log(*u)};
      }
      rc.z = r.numbers(j, "riemann", "z");
      for (std::size_t i = 0; i < rc.z.size(); ++i) {
        if (!(rc.z[i] > 0.0)) r.fail(fmt::format("riemann.z[{}]", i), "must be > 0");
      }
      cfg.riemann = rc;
    }
  }

  if (root.contains("experiment")) {
    const json& e = root.at("experiment");
    if (r.object(e, "experiment", {"eps", "amplitude", "solver", "nt", "nx"})) {
      cfg.experiment.eps = r.numbers(e, "experiment", "eps");
      const auto amp = r.number(e, "experiment", "amplitude", cfg.experiment.amplitude);
      if (amp && *amp < 0.0) r.fail("experiment.amplitude", "must be >= 0");
      if (amp) cfg.experiment.amplitude = *amp;
      const auto solver = r.text(e, "experiment", "solver", cfg.experiment.solver);
      if (solver && *solver != "characteristics" && *solver != "front_tracking") {
        r.fail("experiment.solver", "expected 'characteristics' or 'front_tracking'");
      }
      if (solver) cfg.experiment.solver = *solver;
      if (auto n = r.count(e, "experiment", "nt", cfg.experiment.nt, 1)) cfg.experiment.nt = *n;
      if (auto n = r.count(e, "experiment", "nx", cfg.experiment.nx, 1)) cfg.experiment.nx = *n;
    }
  }

  if (root.contains("seed")) {
    if (!root.at("seed").is_number_unsigned()) {
      r.fail("seed", "expected a non-negative integer");
    } else {
      cfg.seed = root.at("seed").get<std::uint64_t>();
    }
  }

  if (!r.errors.empty()) throw ConfigError(r.errors);
  return cfg;
}

void apply_slices_flag(OutputConfig& out, const std::string& flag) {
  std::stringstream ss(flag);
  std::string part;
  while (std::getline(ss, part, ';')) {
    if (part.empty()) continue;
    const auto eq = part.find('=');
    const std::string axis = part.substr(0, eq);
    if (eq == std::string::npos || (axis != "x" && axis != "t")) {
      throw ConfigError("--slices", fmt::format("expected x=...;t=..., got '{}'", part));
    }
    std::vector<double> values;
    std::stringstream vs(part.substr(eq + 1));
    std::string item;
    while (std::getline(vs, item, ',')) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw ConfigError("--slices", fmt::format("'{}' is not a number", item));
      }
    }
    (axis == "x" ? out.slices_x : out.slices_t) = std::move(values);
  }
}

}  // namespace psa
