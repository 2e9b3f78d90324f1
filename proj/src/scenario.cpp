#include "condual/scenario.hpp"

#include "condual/dual_repr.hpp"
#include "condual/instances.hpp"
#include "condual/polarity.hpp"

#include <algorithm>
#include <functional>
#include <future>
#include <sstream>

namespace condual {

namespace {

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    if (item.empty()) throw std::invalid_argument("empty item in list '" + text + "'");
    out.push_back(item);
  }
  return out;
}

// ---- serialization -------------------------------------------------------

Json to_json(const Rational& v) { return to_string(v); }

Json to_json(const VectorQ& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(to_string(v(i)));
  return out;
}

Json atoms_json(const FiniteSpace& space, const ExtendedVector& v) {
  Json out = Json::object();
  for (std::size_t a = 0; a < v.size(); ++a) out[space.atom_names()[a]] = to_string(v[a]);
  return out;
}

Json atoms_json(const FiniteSpace& space, const AtomVector& v) {
  Json out = Json::object();
  for (Index a = 0; a < v.size(); ++a) out[space.atom_names()[static_cast<std::size_t>(a)]] = to_string(v(a));
  return out;
}

Json gset_json(const FiniteSpace& space, const GSet& s) {
  Json out = Json::array();
  for (std::size_t a = 0; a < s.size(); ++a)
    if (s.contains(a)) out.push_back(space.atom_names()[a]);
  return out;
}

// ---- parsing -------------------------------------------------------------

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ScenarioError(path + ": " + message);
}

Rational read_rational(const Json& j, const std::string& path) {
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  if (!j.is_string()) fail(path, "expected a rational string \"p/q\"");
  try {
    return parse_rational(j.get<std::string>());
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
}

Extended read_extended(const Json& j, const std::string& path) {
  if (j.is_number_integer()) return Extended(Rational(j.get<std::int64_t>()));
  if (!j.is_string()) fail(path, "expected \"p/q\", \"+inf\" or \"-inf\"");
  try {
    return parse_extended(j.get<std::string>());
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
}

VectorQ read_vector(const Json& j, const std::string& path, std::optional<Index> size = std::nullopt) {
  if (!j.is_array()) fail(path, "expected an array of rationals");
  if (size && static_cast<Index>(j.size()) != *size)
    fail(path, "dimension mismatch: expected " + std::to_string(*size) + " entries, got " + std::to_string(j.size()));
  VectorQ v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = read_rational(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

std::size_t atom_index(const FiniteSpace& space, const std::string& name, const std::string& path) {
  const auto& names = space.atom_names();
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) fail(path, "unknown atom '" + name + "'");
  return static_cast<std::size_t>(it - names.begin());
}

const Json& member(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) fail(path, std::string("missing field '") + key + "'");
  return j.at(key);
}

// Object keyed by atom name; every atom must appear exactly once.
template <class F>
void for_each_atom(const FiniteSpace& space, const Json& j, const std::string& path, F&& f) {
  if (!j.is_object()) fail(path, "expected an object keyed by atom names");
  std::vector<bool> seen(space.atom_count(), false);
  for (const auto& [key, value] : j.items()) {
    const std::size_t a = atom_index(space, key, path);
    seen[a] = true;
    f(a, value, path + "." + key);
  }
  for (std::size_t a = 0; a < seen.size(); ++a)
    if (!seen[a]) fail(path, "missing atom '" + space.atom_names()[a] + "'");
}

ExtendedVector read_atom_extended(const FiniteSpace& space, const Json& j, const std::string& path) {
  ExtendedVector v(space.atom_count());
  for_each_atom(space, j, path, [&](std::size_t a, const Json& e, const std::string& p) { v[a] = read_extended(e, p); });
  return v;
}

AtomVector read_atom_rational(const FiniteSpace& space, const Json& j, const std::string& path) {
  AtomVector v(static_cast<Index>(space.atom_count()));
  for_each_atom(space, j, path,
                [&](std::size_t a, const Json& e, const std::string& p) { v(static_cast<Index>(a)) = read_rational(e, p); });
  return v;
}

GSet read_gset(const FiniteSpace& space, const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of atom names");
  GSet s(space.atom_count());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_string()) fail(path, "expected atom names");
    s.set(atom_index(space, j[i].get<std::string>(), path + "[" + std::to_string(i) + "]"));
  }
  return s;
}

SpacePtr read_space(const Json& j) {
  const std::string path = "space";
  const Json& outcomes_json = member(j, "outcomes", path);
  if (!outcomes_json.is_array() || outcomes_json.empty()) fail(path + ".outcomes", "expected a nonempty array of names");
  std::vector<std::string> outcomes;
  for (const auto& o : outcomes_json) {
    if (!o.is_string()) fail(path + ".outcomes", "expected outcome names");
    outcomes.push_back(o.get<std::string>());
  }
  const VectorQ probs =
      read_vector(member(j, "probabilities", path), path + ".probabilities", static_cast<Index>(outcomes.size()));
  const Json& atoms_json = member(j, "atoms", path);
  if (!atoms_json.is_array()) fail(path + ".atoms", "expected an array of {name, outcomes}");
  std::vector<std::vector<Index>> atoms;
  std::vector<std::string> names;
  for (std::size_t a = 0; a < atoms_json.size(); ++a) {
    const std::string p = path + ".atoms[" + std::to_string(a) + "]";
    const Json& name = member(atoms_json[a], "name", p);
    if (!name.is_string()) fail(p + ".name", "expected a string");
    names.push_back(name.get<std::string>());
    std::vector<Index> members;
    const Json& list = member(atoms_json[a], "outcomes", p);
    if (!list.is_array()) fail(p + ".outcomes", "expected an array of outcome names");
    for (const auto& o : list) {
      const auto it = o.is_string() ? std::find(outcomes.begin(), outcomes.end(), o.get<std::string>()) : outcomes.end();
      if (it == outcomes.end()) fail(p + ".outcomes", "unknown outcome " + o.dump());
      members.push_back(static_cast<Index>(it - outcomes.begin()));
    }
    atoms.push_back(std::move(members));
  }
  try {
    return std::make_shared<const FiniteSpace>(std::move(outcomes), probs, std::move(atoms), std::move(names));
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
}

ConvexPL read_pieces(const Json& j, Index d, const std::string& path) {
  const Json& list = member(j, "pieces", path);
  if (!list.is_array() || list.empty()) fail(path + ".pieces", "expected a nonempty array of {slope, offset}");
  ConvexPL f;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string p = path + ".pieces[" + std::to_string(i) + "]";
    f.pieces.push_back({read_vector(member(list[i], "slope", p), p + ".slope", d),
                        read_rational(member(list[i], "offset", p), p + ".offset")});
  }
  return f;
}

ConvexPL read_inner(const FiniteSpace& space, std::size_t a, const Json& j, const std::string& path) {
  const Json& kind = member(j, "kind", path);
  if (kind == "worstcase") return worst_case_pieces(space.conditional_weights(a));
  if (kind == "convexpl") return read_pieces(j, space.atom_size(a), path);
  fail(path + ".kind", "inner map must be 'worstcase' or 'convexpl'");
}

Descriptor read_descriptor(const FiniteSpace& space, std::size_t a, const Json& j, const std::string& path) {
  const Index d = space.atom_size(a);
  const Json& kind_json = member(j, "kind", path);
  if (!kind_json.is_string()) fail(path + ".kind", "expected a string");
  const std::string kind = kind_json.get<std::string>();
  if (kind == "linear")
    return Linear{read_vector(member(j, "density", path), path + ".density", d),
                  j.contains("offset") ? read_rational(j.at("offset"), path + ".offset") : Rational(0)};
  if (kind == "worstcase") return WorstCase{};
  if (kind == "infinite") return InfiniteAtom{};
  if (kind == "convexpl") return read_pieces(j, d, path);
  if (kind == "transformed") {
    const std::string gp = path + ".g";
    const Json& g = member(j, "g", path);
    const Json& bps = member(g, "breakpoints", gp);
    if (!bps.is_array()) fail(gp + ".breakpoints", "expected an array of [t, g(t)] pairs");
    std::vector<std::pair<Rational, Rational>> points;
    for (std::size_t i = 0; i < bps.size(); ++i) {
      const std::string p = gp + ".breakpoints[" + std::to_string(i) + "]";
      if (!bps[i].is_array() || bps[i].size() != 2) fail(p, "expected a [t, g(t)] pair");
      points.emplace_back(read_rational(bps[i][0], p + "[0]"), read_rational(bps[i][1], p + "[1]"));
    }
    const Rational left = g.contains("left_slope") ? read_rational(g.at("left_slope"), gp + ".left_slope") : Rational(0);
    const Rational right =
        g.contains("right_slope") ? read_rational(g.at("right_slope"), gp + ".right_slope") : Rational(0);
    try {
      return Transformed{Transform(std::move(points), left, right), read_inner(space, a, member(j, "inner", path), path + ".inner")};
    } catch (const std::invalid_argument& e) {
      fail(gp, e.what());
    }
  }
  fail(path + ".kind", "unknown map kind '" + kind + "'");
}

QuasiMap read_map(const SpacePtr& space, const Json& j, const std::string& path) {
  std::vector<Descriptor> atoms;
  if (j.is_object() && j.size() == 1 && j.contains("all")) {
    for (std::size_t a = 0; a < space->atom_count(); ++a) atoms.push_back(read_descriptor(*space, a, j.at("all"), path + ".all"));
  } else {
    std::vector<std::optional<Descriptor>> slots(space->atom_count());
    for_each_atom(*space, j, path,
                  [&](std::size_t a, const Json& e, const std::string& p) { slots[a] = read_descriptor(*space, a, e, p); });
    for (auto& s : slots) atoms.push_back(std::move(*s));
  }
  try {
    return QuasiMap(space, std::move(atoms));
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
}

template <class T>
const T& lookup(const std::map<std::string, T>& table, const std::string& name, const char* what,
                const std::string& path) {
  const auto it = table.find(name);
  if (it == table.end()) fail(path, std::string("unknown ") + what + " '" + name + "'");
  return it->second;
}

ConditionalSet read_set(const Scenario& s, const Json& j, const std::string& path) {
  const auto& space = *s.space;
  try {
    if (j.contains("generators")) {
      std::vector<AtomGenerators> atoms(space.atom_count());
      for_each_atom(space, j.at("generators"), path + ".generators",
                    [&](std::size_t a, const Json& e, const std::string& p) {
                      if (e == "full") {
                        atoms[a] = AtomGenerators::whole();
                        return;
                      }
                      const Index d = space.atom_size(a);
                      const Json& vs = member(e, "vertices", p);
                      if (!vs.is_array()) fail(p + ".vertices", "expected an array of vectors");
                      for (std::size_t i = 0; i < vs.size(); ++i)
                        atoms[a].vertices.push_back(read_vector(vs[i], p + ".vertices[" + std::to_string(i) + "]", d));
                      if (e.contains("rays")) {
                        const Json& rs = e.at("rays");
                        if (!rs.is_array()) fail(p + ".rays", "expected an array of vectors");
                        for (std::size_t i = 0; i < rs.size(); ++i)
                          atoms[a].rays.push_back(read_vector(rs[i], p + ".rays[" + std::to_string(i) + "]", d));
                      }
                      if (e.contains("convex")) atoms[a].convex = e.at("convex").get<bool>();
                    });
      return ConditionalSet::from_generators(s.space, std::move(atoms));
    }
    if (j.contains("halfspaces")) {
      const Json& list = j.at("halfspaces");
      if (!list.is_array()) fail(path + ".halfspaces", "expected an array");
      std::vector<HalfSpace> hs;
      for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string p = path + ".halfspaces[" + std::to_string(i) + "]";
        hs.push_back({read_vector(member(list[i], "density", p), p + ".density", space.outcome_count()),
                      read_atom_extended(space, member(list[i], "level", p), p + ".level"),
                      list[i].value("strict", true)});
      }
      return ConditionalSet::from_halfspaces(s.space, std::move(hs));
    }
    if (j.contains("hull")) {
      const Json& names = member(j, "points", path);
      if (!names.is_array()) fail(path + ".points", "expected an array of point names");
      std::vector<RandomVariable> pts;
      for (const auto& n : names) pts.push_back(lookup(s.points, n.get<std::string>(), "point", path + ".points"));
      const std::string kind = j.at("hull").get<std::string>();
      if (kind == "cc") return cc_hull(s.space, pts);
      if (kind == "convex") return l0_convex_hull(s.space, pts);
      fail(path + ".hull", "expected 'cc' or 'convex'");
    }
    if (j.contains("level_set")) {
      const Json& ls = j.at("level_set");
      const std::string p = path + ".level_set";
      const QuasiMap& map = lookup(s.maps, member(ls, "map", p).get<std::string>(), "map", p + ".map");
      const ExtendedVector& level = lookup(s.levels, member(ls, "level", p).get<std::string>(), "level", p + ".level");
      return level_set(map, {level, ls.value("strict", false), std::nullopt});
    }
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
  fail(path, "expected one of 'generators', 'halfspaces', 'hull', 'level_set'");
}

// ---- tasks ---------------------------------------------------------------

enum class Arg { Set, Point, Map, Family, Level, Relation, LevelOrPoint };

struct CommandSpec {
  std::vector<Arg> required;
  std::vector<Arg> optional;
  std::set<std::string> options;
  std::set<std::string> flags;
};

const std::map<std::string, CommandSpec>& commands() {
  static const std::map<std::string, CommandSpec> table{
      {"check-separation", {{Arg::Set, Arg::Point}, {}, {"region"}, {}}},
      {"polar", {{Arg::Set}, {}, {"probe"}, {"cone"}}},
      {"bipolar-check", {{Arg::Set}, {}, {"instances"}, {"cone"}}},
      {"trivial-region", {{Arg::Set}, {}, {}, {}}},
      {"outside-region", {{Arg::Set, Arg::Point}, {}, {}, {}}},
      {"maximal-set", {{Arg::Family, Arg::Level, Arg::Relation}, {}, {}, {}}},
      {"check-qco", {{Arg::Map}, {}, {"instances"}, {}}},
      {"check-eqc", {{Arg::Map}, {}, {"instances"}, {}}},
      {"eval-R", {{Arg::Map, Arg::LevelOrPoint, Arg::Point}, {}, {}, {}}},
      {"dual-repr", {{Arg::Map, Arg::Point}, {}, {"eps"}, {}}},
      {"usc-max", {{Arg::Map, Arg::Point}, {}, {}, {}}},
      {"properties-R", {{}, {Arg::Map}, {"instances"}, {}}},
      {"norms", {{Arg::Point}, {}, {"p"}, {}}},
  };
  return table;
}

Task read_task(const Json& j, const std::string& path) {
  std::vector<std::string> tokens;
  if (j.is_string()) {
    tokens = tokenize(j.get<std::string>());
  } else if (j.is_array()) {
    for (const auto& t : j) {
      if (!t.is_string()) fail(path, "task tokens must be strings");
      tokens.push_back(t.get<std::string>());
    }
  } else {
    fail(path, "expected a command string or an array of tokens");
  }
  if (tokens.empty()) fail(path, "empty task");
  Task task;
  task.source = j;
  task.command = tokens.front();
  const auto it = commands().find(task.command);
  if (it == commands().end()) fail(path, "unknown command '" + task.command + "'");
  const CommandSpec& spec = it->second;
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    const std::string& t = tokens[i];
    if (t.rfind("--", 0) == 0 && t.size() > 2) {
      std::string key = t.substr(2);
      if (const auto eq = key.find('='); eq != std::string::npos) {
        task.options[key.substr(0, eq)] = key.substr(eq + 1);
        key = key.substr(0, eq);
        if (!spec.options.count(key)) fail(path, "option --" + key + " is not accepted by " + task.command);
      } else if (spec.flags.count(key)) {
        task.flags.insert(key);
      } else if (spec.options.count(key)) {
        if (i + 1 >= tokens.size()) fail(path, "option --" + key + " needs a value");
        task.options[key] = tokens[++i];
      } else {
        fail(path, "option --" + key + " is not accepted by " + task.command);
      }
    } else {
      task.args.push_back(t);
    }
  }
  const std::size_t lo = spec.required.size(), hi = lo + spec.optional.size();
  if (task.args.size() < lo || task.args.size() > hi)
    fail(path, task.command + " takes " + (lo == hi ? std::to_string(lo) : std::to_string(lo) + " to " + std::to_string(hi)) +
                   " arguments, got " + std::to_string(task.args.size()));
  return task;
}

void check_task_names(const Scenario& s, const Task& task, const std::string& path) {
  const CommandSpec& spec = commands().at(task.command);
  for (std::size_t i = 0; i < task.args.size(); ++i) {
    const Arg kind = i < spec.required.size() ? spec.required[i] : spec.optional[i - spec.required.size()];
    const std::string& name = task.args[i];
    const std::string p = path + " argument " + std::to_string(i + 1);
    switch (kind) {
      case Arg::Set: lookup(s.sets, name, "set", p); break;
      case Arg::Point: lookup(s.points, name, "point", p); break;
      case Arg::Map: lookup(s.maps, name, "map", p); break;
      case Arg::Family: lookup(s.families, name, "family", p); break;
      case Arg::Level: lookup(s.levels, name, "level", p); break;
      case Arg::LevelOrPoint:
        if (!s.levels.count(name) && !s.points.count(name)) fail(p, "unknown level or point '" + name + "'");
        break;
      case Arg::Relation:
        try {
          parse_relation(name);
        } catch (const std::invalid_argument& e) {
          fail(p, e.what());
        }
        break;
    }
  }
  if (task.options.count("eps")) {
    try {
      parse_rational_list(task.options.at("eps"));
    } catch (const std::invalid_argument& e) {
      fail(path + " --eps", e.what());
    }
  }
  for (const char* key : {"region", "probe"}) {
    if (!task.options.count(key)) continue;
    try {
      split_commas(task.options.at(key));
    } catch (const std::invalid_argument& e) {
      fail(path + " --" + key, e.what());
    }
  }
  if (task.options.count("region"))
    for (const auto& name : split_commas(task.options.at("region"))) atom_index(*s.space, name, path + " --region");
}

}  // namespace

Json parse_json_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, column = 1;
    const std::size_t end = std::min(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string message = e.what();
    if (const auto pos = message.find("syntax error"); pos != std::string::npos) message = message.substr(pos);
    throw ScenarioError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message);
  }
}

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::string current;
  bool active = false;
  char quote = 0;
  for (char c : line) {
    if (quote) {
      if (c == quote) quote = 0;
      else current += c;
    } else if (c == '\'' || c == '"') {
      quote = c;
      active = true;
    } else if (c == ' ' || c == '\t') {
      if (active) out.push_back(std::move(current));
      current.clear();
      active = false;
    } else {
      current += c;
      active = true;
    }
  }
  if (quote) throw ScenarioError("unterminated quote in task '" + line + "'");
  if (active) out.push_back(std::move(current));
  return out;
}

std::vector<Rational> parse_rational_list(const std::string& text) {
  std::vector<Rational> out;
  for (const auto& item : split_commas(text)) out.push_back(parse_rational(item));
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

Scenario load_scenario(const Json& document) {
  if (!document.is_object()) fail("scenario", "expected a JSON object");
  Scenario s;
  s.source = document;
  s.space = read_space(member(document, "space", "scenario"));
  const auto& space = *s.space;

  const auto section = [&](const char* key) -> const Json* {
    if (!document.contains(key)) return nullptr;
    if (!document.at(key).is_object()) fail(key, "expected an object keyed by name");
    return &document.at(key);
  };
  if (const Json* points = section("points"))
    for (const auto& [name, value] : points->items())
      s.points.emplace(name, read_vector(value, std::string("points.") + name, space.outcome_count()));
  if (const Json* levels = section("levels"))
    for (const auto& [name, value] : levels->items())
      s.levels.emplace(name, read_atom_extended(space, value, std::string("levels.") + name));
  if (const Json* families = section("families"))
    for (const auto& [name, value] : families->items()) {
      const std::string p = std::string("families.") + name;
      if (!value.is_array() || value.empty()) fail(p, "expected a nonempty array of atom-keyed objects");
      std::vector<ExtendedVector> members;
      for (std::size_t i = 0; i < value.size(); ++i)
        members.push_back(read_atom_extended(space, value[i], p + "[" + std::to_string(i) + "]"));
      s.families.emplace(name, std::move(members));
    }
  if (const Json* maps = section("maps"))
    for (const auto& [name, value] : maps->items()) s.maps.emplace(name, read_map(s.space, value, std::string("maps.") + name));
  if (const Json* sets = section("sets"))
    for (const auto& [name, value] : sets->items()) s.sets.emplace(name, read_set(s, value, std::string("sets.") + name));

  if (document.contains("tasks")) {
    const Json& tasks = document.at("tasks");
    if (!tasks.is_array()) fail("tasks", "expected an array");
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      const std::string p = "tasks[" + std::to_string(i) + "]";
      Task task = read_task(tasks[i], p);
      check_task_names(s, task, p);
      s.tasks.push_back(std::move(task));
    }
  }
  return s;
}

namespace {

std::size_t instances_for(const Task& task, const RunOptions& options, std::size_t fallback) {
  if (task.options.count("instances")) return static_cast<std::size_t>(std::stoull(task.options.at("instances")));
  return options.instances.value_or(fallback);
}

Json separation_json(const FiniteSpace& space, const SeparationCertificate& cert) {
  return Json{{"functional", to_json(cert.functional)},
              {"margin", atoms_json(space, cert.margin)},
              {"region", gset_json(space, cert.region)},
              {"grade", to_string(cert.grade)}};
}

SeparationCertificate separation_from_json(const FiniteSpace& space, const Json& j) {
  SeparationCertificate cert;
  cert.functional = read_vector(member(j, "functional", "certificate"), "certificate.functional", space.outcome_count());
  cert.margin = read_atom_extended(space, member(j, "margin", "certificate"), "certificate.margin");
  cert.region = read_gset(space, member(j, "region", "certificate"), "certificate.region");
  cert.grade = member(j, "grade", "certificate") == "boundary" ? SeparationGrade::Boundary : SeparationGrade::Strict;
  return cert;
}

Json regions_json(const FiniteSpace& space, const DualRegions& r) {
  return Json{{"upsilon", gset_json(space, r.upsilon)},
              {"finite", gset_json(space, r.finite)},
              {"constant", gset_json(space, r.constant)},
              {"nonconstant", gset_json(space, r.nonconstant)},
              {"bounded", gset_json(space, r.bounded)}};
}

Json certificate_json(const FiniteSpace& space, const DualCertificate& cert) {
  Json entries = Json::array();
  for (const auto& e : cert.entries)
    entries.push_back(Json{{"epsilon", atoms_json(space, e.epsilon)},
                           {"target", atoms_json(space, e.target)},
                           {"density", to_json(e.density)},
                           {"level", atoms_json(space, e.level)},
                           {"value", atoms_json(space, e.value)},
                           {"gap", atoms_json(space, e.gap)},
                           {"degenerate", gset_json(space, e.degenerate)},
                           {"margin", atoms_json(space, e.margin)},
                           {"spot_checks", e.spot_checks}});
  return Json{{"x", to_json(cert.x)},
              {"value", atoms_json(space, cert.value)},
              {"regions", regions_json(space, cert.regions)},
              {"entries", std::move(entries)},
              {"issues", cert.issues}};
}

DualCertificate certificate_from_json(const FiniteSpace& space, const Json& j) {
  const std::string p = "certificate";
  DualCertificate cert;
  cert.x = read_vector(member(j, "x", p), p + ".x", space.outcome_count());
  cert.value = read_atom_extended(space, member(j, "value", p), p + ".value");
  const Json& r = member(j, "regions", p);
  cert.regions = {read_gset(space, member(r, "upsilon", p), p + ".regions.upsilon"),
                  read_gset(space, member(r, "finite", p), p + ".regions.finite"),
                  read_gset(space, member(r, "constant", p), p + ".regions.constant"),
                  read_gset(space, member(r, "nonconstant", p), p + ".regions.nonconstant"),
                  read_gset(space, member(r, "bounded", p), p + ".regions.bounded")};
  const Json& entries = member(j, "entries", p);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string q = p + ".entries[" + std::to_string(i) + "]";
    const Json& e = entries[i];
    DualEntry entry;
    entry.epsilon = read_atom_rational(space, member(e, "epsilon", q), q + ".epsilon");
    entry.target = read_atom_extended(space, member(e, "target", q), q + ".target");
    entry.density = read_vector(member(e, "density", q), q + ".density", space.outcome_count());
    entry.level = read_atom_rational(space, member(e, "level", q), q + ".level");
    entry.value = read_atom_extended(space, member(e, "value", q), q + ".value");
    entry.gap = read_atom_extended(space, member(e, "gap", q), q + ".gap");
    entry.degenerate = read_gset(space, member(e, "degenerate", q), q + ".degenerate");
    entry.margin = read_atom_extended(space, member(e, "margin", q), q + ".margin");
    cert.entries.push_back(std::move(entry));
  }
  return cert;
}

Json polar_json(const FiniteSpace& space, const PolarSet& p) {
  Json atoms = Json::object();
  for (std::size_t a = 0; a < space.atom_count(); ++a) {
    if (!p.base.contains(a)) continue;
    Json list = Json::array();
    for (const auto& h : p.atoms[a])
      list.push_back(Json{{"density", to_json(h.density)}, {"relation", h.strict ? "<" : "<="}, {"bound", to_json(h.level)}});
    atoms[space.atom_names()[a]] = std::move(list);
  }
  return Json{{"base", gset_json(space, p.base)}, {"cone", p.cone}, {"atoms", std::move(atoms)}};
}

Json property_json(const PropertyReport& report) {
  Json out = Json::array();
  for (const auto& p : report.properties) {
    Json item{{"name", p.name}, {"checked", p.checked}, {"passed", p.passed}};
    if (p.counterexample) item["counterexample"] = *p.counterexample;
    out.push_back(std::move(item));
  }
  return out;
}

const char* verdict(bool ok, bool has_witness = false) { return ok ? "pass" : has_witness ? "counterexample" : "fail"; }

Json dispatch(const Scenario& s, const Task& task, const RunOptions& options, Rng& rng) {
  const auto& space = *s.space;
  const auto& args = task.args;
  const auto set = [&](std::size_t i) -> const ConditionalSet& { return s.sets.at(args[i]); };
  const auto point = [&](std::size_t i) -> const RandomVariable& { return s.points.at(args[i]); };
  const auto map = [&](std::size_t i) -> const QuasiMap& { return s.maps.at(args[i]); };
  const std::string& cmd = task.command;

  if (cmd == "check-separation") {
    const ConditionalSet& c = set(0);
    const RandomVariable& x = point(1);
    std::optional<GSet> region;
    if (task.options.count("region")) {
      region = GSet(space.atom_count());
      for (const auto& name : split_commas(task.options.at("region"))) region->set(atom_index(space, name, "--region"));
    }
    const auto cert = separate(c, x, region);
    Json out{{"outside", is_outside(c, x)}, {"outside_region", gset_json(space, outside_region(c, x))}};
    if (!cert) {
      out["verdict"] = "fail";
      out["reason"] = "no separating density on some atom of the region";
      return out;
    }
    const bool ok = verify_separation(c, x, *cert);
    out["verdict"] = verdict(ok);
    out["certificate"] = separation_json(space, *cert);
    return out;
  }
  if (cmd == "polar") {
    const PolarSet p = polar(set(0), task.flags.count("cone") > 0);
    Json out{{"verdict", "pass"}, {"polar", polar_json(space, p)}};
    if (task.options.count("probe")) {
      Json probes = Json::object();
      for (const auto& name : split_commas(task.options.at("probe")))
        probes[name] = polar_membership(p, lookup(s.points, name, "point", "--probe"));
      out["membership"] = std::move(probes);
    }
    return out;
  }
  if (cmd == "bipolar-check") {
    const BipolarReport r = bipolar_check(set(0), rng, task.flags.count("cone") > 0, instances_for(task, options, 100));
    Json discrepancies = Json::array();
    for (const auto& d : r.discrepancies) {
      Json item{{"kind", d.kind}, {"point", to_json(d.point)}};
      if (d.functional) item["functional"] = to_json(*d.functional);
      discrepancies.push_back(std::move(item));
    }
    return Json{{"verdict", verdict(r.passed(), true)},
                {"generators_checked", r.generators_checked},
                {"probes_drawn", r.probes_drawn},
                {"nonmember_probes", r.nonmember_probes},
                {"discrepancies", std::move(discrepancies)}};
  }
  if (cmd == "trivial-region") {
    const TrivialRegion t = trivial_region(set(0));
    return Json{{"verdict", "pass"}, {"full", gset_json(space, t.full)}, {"nontrivial", gset_json(space, t.nontrivial)}};
  }
  if (cmd == "outside-region") {
    const ConditionalSet& c = set(0);
    const RandomVariable& x = point(1);
    return Json{{"verdict", "pass"},
                {"outside_region", gset_json(space, outside_region(c, x))},
                {"nontrivial", gset_json(space, trivial_region(c).nontrivial)},
                {"outside", is_outside(c, x)}};
  }
  if (cmd == "maximal-set") {
    const auto& family = s.families.at(args[0]);
    const auto& reference = s.levels.at(args[1]);
    const MaximalSet m = maximal_set(family, reference, parse_relation(args[2]));
    const bool partition = (m.holds_everywhere & m.violated).empty() && (m.holds_everywhere | m.violated).full();
    return Json{{"verdict", verdict(partition)},
                {"relation", to_string(parse_relation(args[2]))},
                {"holds", gset_json(space, m.holds_everywhere)},
                {"violated", gset_json(space, m.violated)},
                {"witness", atoms_json(space, m.witness)}};
  }
  if (cmd == "check-qco") {
    const QcoReport r = check_qco(oracle(map(0)), space, rng, instances_for(task, options, 500));
    Json out{{"verdict", verdict(r.passed(), true)}, {"trials", r.trials}, {"failures", r.failures}};
    if (r.witness)
      out["witness"] = Json{{"x1", to_json(r.witness->x1)},
                            {"x2", to_json(r.witness->x2)},
                            {"lambda", atoms_json(space, r.witness->lambda)},
                            {"atom", space.atom_names()[r.witness->atom]}};
    return out;
  }
  if (cmd == "check-eqc") {
    const EqcReport r = check_eqc(map(0), rng, instances_for(task, options, 100));
    Json out{{"verdict", verdict(r.passed(), true)},
             {"trials", r.trials},
             {"separations", r.separations},
             {"failures", r.failures}};
    if (r.witness)
      out["witness"] =
          Json{{"level", atoms_json(space, r.witness->level)}, {"strict", r.witness->strict}, {"x", to_json(r.witness->x)}};
    return out;
  }
  if (cmd == "eval-R") {
    const QuasiMap& pi = map(0);
    const RandomVariable& z = point(2);
    AtomVector level(static_cast<Index>(space.atom_count()));
    if (s.points.count(args[1])) {
      level = pairing(s.points.at(args[1]), z, space);
    } else {
      const auto& y = s.levels.at(args[1]);
      for (std::size_t a = 0; a < y.size(); ++a) {
        if (!y[a].finite()) fail("eval-R", "level '" + args[1] + "' must be finite on every atom");
        level(static_cast<Index>(a)) = y[a].value();
      }
    }
    const auto detail = eval_R_detail(pi, level, z);
    ExtendedVector value;
    Json minimizers = Json::object();
    for (std::size_t a = 0; a < detail.size(); ++a) {
      value.push_back(detail[a].value);
      if (detail[a].point) minimizers[space.atom_names()[a]] = to_json(*detail[a].point);
    }
    return Json{{"verdict", "pass"},
                {"level", atoms_json(space, level)},
                {"density", to_json(z)},
                {"value", atoms_json(space, value)},
                {"minimizers", std::move(minimizers)}};
  }
  if (cmd == "dual-repr") {
    Schedule schedule;
    if (task.options.count("eps")) schedule = uniform_schedule(space.atom_count(), parse_rational_list(task.options.at("eps")));
    else if (options.eps) schedule = uniform_schedule(space.atom_count(), *options.eps);
    else schedule = default_schedule(space.atom_count());
    const DualCertificate cert = represent(map(0), point(1), schedule, rng);
    return Json{{"verdict", verdict(cert.passed(), true)}, {"certificate", certificate_json(space, cert)}};
  }
  if (cmd == "usc-max") {
    const UscResult r = usc_max(map(0), point(1));
    return Json{{"verdict", verdict(r.exact(), true)},
                {"density", to_json(r.density)},
                {"value", atoms_json(space, r.value)},
                {"attained", atoms_json(space, r.attained)},
                {"separated", gset_json(space, r.separated)},
                {"issues", r.issues}};
  }
  if (cmd == "properties-R") {
    const std::size_t n = instances_for(task, options, 200);
    PropertyReport report;
    if (!args.empty()) {
      report = property_suite_R(map(0), rng, n);
    } else {
      for (std::size_t k = 0; k < n; ++k) {
        const SpacePtr sp = random_space(rng);
        const QuasiMap pi = random_map(sp, all_families[k % all_families.size()], rng, rng.below(4) == 0);
        report.merge(property_suite_R(pi, rng, 1));
      }
    }
    return Json{{"verdict", verdict(report.passed(), true)}, {"instances", n}, {"properties", property_json(report)}};
  }
  if (cmd == "norms") {
    const RandomVariable& x = point(0);
    Json out{{"verdict", "pass"}};
    const std::vector<std::pair<std::string, NormKind>> kinds{
        {"1", NormKind::L1}, {"2", NormKind::L2Squared}, {"inf", NormKind::LInf}};
    Json norms = Json::object();
    for (const auto& [name, kind] : kinds) {
      if (task.options.count("p") && parse_norm_kind(task.options.at("p")) != kind) continue;
      norms[name == "2" ? "2_squared" : name] = atoms_json(space, cond_norm(x, kind, space));
    }
    out["norms"] = std::move(norms);
    return out;
  }
  throw std::logic_error("unhandled command " + cmd);
}

std::uint64_t task_seed(std::uint64_t seed, std::size_t index) { return seed + 0x9E3779B97F4A7C15ULL * (index + 1); }

}  // namespace

Json run_task(const Scenario& scenario, std::size_t index, const RunOptions& options) {
  const Task& task = scenario.tasks.at(index);
  Rng rng(task_seed(options.seed, index));
  Json head{{"index", index}, {"task", task.source}, {"command", task.command}};
  Json body;
  try {
    body = dispatch(scenario, task, options, rng);
  } catch (const std::exception& e) {
    body = Json{{"verdict", "fail"}, {"error", e.what()}};
  }
  for (auto& [key, value] : body.items()) head[key] = value;
  return head;
}

Json run_scenario(const Scenario& scenario, const RunOptions& options) {
  std::vector<Json> results(scenario.tasks.size());
  if (options.parallel) {
    std::vector<std::future<Json>> futures;
    for (std::size_t i = 0; i < scenario.tasks.size(); ++i)
      futures.push_back(std::async(std::launch::async, [&, i] { return run_task(scenario, i, options); }));
    for (std::size_t i = 0; i < futures.size(); ++i) results[i] = futures[i].get();
  } else {
    for (std::size_t i = 0; i < scenario.tasks.size(); ++i) results[i] = run_task(scenario, i, options);
  }
  std::size_t passed = 0;
  for (const auto& r : results) passed += r.at("verdict") == "pass";

  Json opts{{"seed", options.seed}};
  if (options.eps) {
    Json eps = Json::array();
    for (const auto& e : *options.eps) eps.push_back(to_string(e));
    opts["eps"] = std::move(eps);
  }
  if (options.instances) opts["instances"] = *options.instances;
  return Json{{"options", std::move(opts)},
              {"summary", {{"tasks", results.size()}, {"passed", passed}, {"failed", results.size() - passed}}},
              {"tasks", results},
              {"scenario", scenario.source}};
}

bool report_passed(const Json& report) {
  for (const auto& t : report.at("tasks"))
    if (t.at("verdict") != "pass") return false;
  return true;
}

std::vector<std::string> verify_report(const Json& report) {
  std::vector<std::string> issues;
  const Scenario s = load_scenario(member(report, "scenario", "report"));
  const auto& space = *s.space;
  const Json& opts = member(report, "options", "report");
  RunOptions options;
  options.seed = opts.at("seed").get<std::uint64_t>();
  if (opts.contains("eps")) {
    options.eps.emplace();
    for (const auto& e : opts.at("eps")) options.eps->push_back(parse_rational(e.get<std::string>()));
  }
  if (opts.contains("instances")) options.instances = opts.at("instances").get<std::size_t>();

  const Json& tasks = member(report, "tasks", "report");
  if (tasks.size() != s.tasks.size()) issues.push_back("report lists " + std::to_string(tasks.size()) +
                                                       " tasks, scenario has " + std::to_string(s.tasks.size()));
  for (std::size_t i = 0; i < std::min(tasks.size(), s.tasks.size()); ++i) {
    const Json& t = tasks[i];
    const Task& task = s.tasks[i];
    const std::string where = "tasks[" + std::to_string(i) + "] (" + task.command + "): ";
    const bool pass = t.at("verdict") == "pass";
    try {
      if (task.command == "check-separation" && pass) {
        const auto cert = separation_from_json(space, member(t, "certificate", where));
        if (!verify_separation(s.sets.at(task.args[0]), s.points.at(task.args[1]), cert))
          issues.push_back(where + "separation certificate does not re-verify");
        continue;
      }
      if (task.command == "dual-repr") {
        const QuasiMap& pi = s.maps.at(task.args[0]);
        const DualCertificate cert = certificate_from_json(space, member(t, "certificate", where));
        if (cert.x != s.points.at(task.args[1])) issues.push_back(where + "certificate point differs from the scenario");
        for (const auto& issue : verify_certificate(pi, cert)) issues.push_back(where + issue);
        if (pass && !t.at("certificate").at("issues").empty()) issues.push_back(where + "pass verdict with issues");
        continue;
      }
      if (task.command == "usc-max") {
        const QuasiMap& pi = s.maps.at(task.args[0]);
        const RandomVariable& x = s.points.at(task.args[1]);
        const RandomVariable z = read_vector(member(t, "density", where), where + "density", space.outcome_count());
        const ExtendedVector attained = eval_R(pi, pairing(x, z, space), z);
        if (attained != read_atom_extended(space, t.at("attained"), where + "attained"))
          issues.push_back(where + "stored attained value differs");
        if (pass && attained != eval(pi, x)) issues.push_back(where + "density does not attain pi(x)");
        continue;
      }
      // Remaining commands are deterministic given the seed: re-run and
      // compare the whole result.
      if (run_task(s, i, options) != t) issues.push_back(where + "re-run differs from the stored result");
    } catch (const std::exception& e) {
      issues.push_back(where + e.what());
    }
  }
  return issues;
}

}  // namespace condual
