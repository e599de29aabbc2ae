#include "tacsim/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "tacsim/error.hpp"

namespace tacsim {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw std::invalid_argument("not a number");
  return v;
}

template <class Int>
Int to_int(const std::string& s) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw std::invalid_argument("not an integer");
  return v;
}

bool to_bool(const std::string& s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw std::invalid_argument("expected true or false");
}

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <class T, class F>
std::string join(const std::vector<T>& items, F&& fmt) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += fmt(items[i]);
  }
  return out;
}

struct Field {
  std::string section;
  std::string key;
  std::function<void(const std::string&)> set;
  std::function<std::string()> get;
};

Field dbl(std::string sec, std::string key, double& ref) {
  return {std::move(sec), std::move(key), [&ref](const std::string& s) { ref = to_double(s); },
          [&ref] { return num(ref); }};
}

template <class Int>
Field integer(std::string sec, std::string key, Int& ref) {
  return {std::move(sec), std::move(key), [&ref](const std::string& s) { ref = to_int<Int>(s); },
          [&ref] { return std::to_string(ref); }};
}

std::vector<Field> fields(ScenarioConfig& c) {
  DynamicsParams& d = c.dynamics;
  TaskGeometry& g = c.task.geometry;
  TapProtocol& tap = c.task.tap;
  PseudoRealConfig& pr = c.pseudo_real;
  TrainConfig& t = c.train;
  SweepSettings& sw = c.sweep;
  return {
      dbl("dynamics", "f_push", d.f_push),
      dbl("dynamics", "f_pull", d.f_pull),
      dbl("dynamics", "damping", d.damping),
      dbl("dynamics", "tau", d.tau),
      dbl("dynamics", "dt", d.dt),
      integer("dynamics", "steps_per_depth", tap.steps_per_depth),

      dbl("randomization", "factor", c.randomization.factor),
      {"randomization", "per_parameter",
       [&c](const std::string& s) { c.randomization.per_parameter = to_bool(s); },
       [&c] { return std::string(c.randomization.per_parameter ? "true" : "false"); }},

      {"task", "kind", [&c](const std::string& s) { c.task.kind = parse_task(s); },
       [&c] { return std::string(to_string(c.task.kind)); }},
      {"task", "representation", [&c](const std::string& s) { c.rep_kind = parse_rep_kind(s); },
       [&c] { return std::string(to_string(c.rep_kind)); }},
      integer("task", "rings", c.rings),
      dbl("task", "tip_radius", c.tip_radius),
      dbl("task", "offset_range", g.offset_range),
      dbl("task", "rotation_range_deg", g.rotation_range_deg),
      dbl("task", "pole_radius", g.pole_radius),
      dbl("task", "disc_inner_radius", g.disc_inner_radius),
      dbl("task", "disc_outer_radius", g.disc_outer_radius),
      dbl("task", "radius_perturbation", g.radius_perturbation),
      integer("task", "angle_grid", g.angle_grid),
      dbl("task", "cuboid_half_width", g.cuboid_half_width),
      dbl("task", "cuboid_half_height", g.cuboid_half_height),
      dbl("task", "cylinder_radius", g.cylinder_radius),
      dbl("task", "cylinder_half_length", g.cylinder_half_length),
      dbl("task", "max_press", tap.max_press),
      integer("task", "min_depths", tap.min_depths),
      integer("task", "max_depths", tap.max_depths),

      dbl("noise", "train_sigma", c.train_noise),

      dbl("pseudo_real", "multiplier", pr.multiplier),
      dbl("pseudo_real", "noise_sigma", pr.noise_sigma),
      integer("pseudo_real", "seed", pr.seed),
      integer("pseudo_real", "rounds", pr.rounds),
      integer("pseudo_real", "taps_per_round", pr.taps_per_round),

      integer("train", "batch_size", t.batch_size),
      dbl("train", "learning_rate", t.learning_rate),
      integer("train", "epochs", t.epochs),
      integer("train", "seed", t.seed),
      integer("train", "patience", t.patience),
      dbl("train", "validation_fraction", t.validation_fraction),
      {"train", "optimizer", [&t](const std::string& s) { t.optimizer = parse_optimizer(s); },
       [&t] { return std::string(to_string(t.optimizer)); }},
      dbl("train", "momentum", t.momentum),
      dbl("train", "beta1", t.beta1),
      dbl("train", "beta2", t.beta2),
      dbl("train", "adam_epsilon", t.adam_epsilon),
      {"train", "standardize_inputs", [&t](const std::string& s) { t.standardize_inputs = to_bool(s); },
       [&t] { return std::string(t.standardize_inputs ? "true" : "false"); }},
      {"train", "hidden",
       [&c](const std::string& s) {
         c.hidden.clear();
         for (const auto& item : split_list(s)) c.hidden.push_back(to_int<int>(item));
       },
       [&c] { return join(c.hidden, [](int w) { return std::to_string(w); }); }},

      {"sweep", "representations",
       [&sw](const std::string& s) {
         sw.representations.clear();
         for (const auto& item : split_list(s)) sw.representations.push_back(parse_rep_kind(item));
       },
       [&sw] {
         return join(sw.representations, [](RepKind k) { return std::string(to_string(k)); });
       }},
      {"sweep", "factors",
       [&sw](const std::string& s) {
         sw.factors.clear();
         for (const auto& item : split_list(s)) sw.factors.push_back(to_double(item));
       },
       [&sw] { return join(sw.factors, num); }},
      {"sweep", "seeds",
       [&sw](const std::string& s) {
         sw.seeds.clear();
         for (const auto& item : split_list(s)) sw.seeds.push_back(to_int<std::uint64_t>(item));
       },
       [&sw] { return join(sw.seeds, [](std::uint64_t v) { return std::to_string(v); }); }},
      integer("sweep", "train_count", sw.train_count),
      integer("sweep", "test_count", sw.test_count),
      {"sweep", "test_factors",
       [&sw](const std::string& s) {
         sw.test_factors.clear();
         for (const auto& item : split_list(s)) sw.test_factors.push_back(to_double(item));
       },
       [&sw] { return join(sw.test_factors, num); }},
  };
}

void check_factor(double f, const char* what) {
  if (!(f >= 0.0 && f <= 1.0)) fail(ErrorKind::Config, std::string(what) + " must lie in [0, 1]");
}

}  // namespace

void ScenarioConfig::validate() const {
  try {
    dynamics.validate();
    RandomizationSpec r = randomization;
    r.baseline = dynamics;
    r.validate();
    task.validate();
    train.validate();
  } catch (const Error& e) {
    fail(ErrorKind::Config, e.what());
  }
  if (rings < 0) fail(ErrorKind::Config, "task.rings must be >= 0");
  if (!(tip_radius > 0.0)) fail(ErrorKind::Config, "task.tip_radius must be > 0");
  if (!(train_noise >= 0.0)) fail(ErrorKind::Config, "noise.train_sigma must be >= 0");
  if (!(pseudo_real.multiplier > 0.0)) fail(ErrorKind::Config, "pseudo_real.multiplier must be > 0");
  if (!(pseudo_real.noise_sigma >= 0.0))
    fail(ErrorKind::Config, "pseudo_real.noise_sigma must be >= 0");
  if (pseudo_real.rounds < 1) fail(ErrorKind::Config, "pseudo_real.rounds must be >= 1");
  if (pseudo_real.taps_per_round < 1)
    fail(ErrorKind::Config, "pseudo_real.taps_per_round must be >= 1");
  if (hidden.empty()) fail(ErrorKind::Config, "train.hidden must list at least one width");
  for (int w : hidden)
    if (w < 1) fail(ErrorKind::Config, "train.hidden widths must be >= 1");
  if (sweep.representations.empty() || sweep.factors.empty() || sweep.seeds.empty())
    fail(ErrorKind::Config, "sweep lists must be nonempty");
  for (double f : sweep.factors) check_factor(f, "sweep.factors");
  for (double f : sweep.test_factors) check_factor(f, "sweep.test_factors");
  if (sweep.train_count < 1 || sweep.test_count < 1)
    fail(ErrorKind::Config, "sweep counts must be >= 1");
}

GenerationContext ScenarioConfig::generation_context() const {
  RandomizationSpec r = randomization;
  r.baseline = dynamics;
  return GenerationContext::make(task, r, rep_kind, train_noise, rings, tip_radius);
}

ScenarioConfig parse_config(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorKind::Config, "config line " + std::to_string(e.line()) + ": " + e.message());
  }

  ScenarioConfig config;
  std::map<std::string, std::map<std::string, Field*>> index;
  auto table = fields(config);
  for (Field& f : table) index[f.section][f.key] = &f;

  for (const auto& [section, body] : tree) {
    const auto sec = index.find(section);
    if (sec == index.end()) {
      if (!body.data().empty())
        fail(ErrorKind::Config, "config: keys must sit inside a section ('" + section + "')");
      fail(ErrorKind::Config, "config: unknown section [" + section + "]");
    }
    for (const auto& [key, value] : body) {
      const auto it = sec->second.find(key);
      if (it == sec->second.end())
        fail(ErrorKind::Config, "config: unknown key '" + key + "' in [" + section + "]");
      const std::string raw = trim(value.data());
      try {
        it->second->set(raw);
      } catch (const std::exception& e) {
        fail(ErrorKind::Config,
             "config: bad value '" + raw + "' for " + section + "." + key + " (" + e.what() + ")");
      }
    }
  }
  config.randomization.baseline = config.dynamics;
  config.validate();
  return config;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open config '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string config_to_text(const ScenarioConfig& config) {
  ScenarioConfig copy = config;
  std::string out;
  std::string current;
  for (const Field& f : fields(copy)) {
    if (f.section != current) {
      if (!current.empty()) out += '\n';
      out += '[' + f.section + "]\n";
      current = f.section;
    }
    out += f.key + " = " + f.get() + '\n';
  }
  return out;
}

}  // namespace tacsim
