#include "etale/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "etale/error.hpp"
#include "json.hpp"

namespace etale {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

[[noreturn]] void malformed(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::MalformedSpec, where + ": " + what, where);
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorKind::ParseError,
                "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + e.what());
  }
}

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) malformed(where, "expected an object");
}

void allow_fields(const json& j, const std::string& where, std::initializer_list<const char*> fields) {
  require_object(j, where);
  std::set<std::string> ok(fields.begin(), fields.end());
  for (const auto& [k, v] : j.items())
    if (!ok.count(k)) malformed(where, "unknown field '" + k + "'");
}

const json& field(const json& j, const std::string& where, const char* name) {
  auto it = j.find(name);
  if (it == j.end()) malformed(where, std::string("missing field '") + name + "'");
  return *it;
}

std::int64_t get_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) malformed(where, "expected an integer");
  return j.get<std::int64_t>();
}

std::int64_t int_field(const json& j, const std::string& where, const char* name) {
  return get_int(field(j, where, name), where + "." + name);
}

std::vector<std::int64_t> int_list(const json& j, const std::string& where) {
  if (!j.is_array()) malformed(where, "expected an array of integers");
  std::vector<std::int64_t> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_int(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

std::string get_string(const json& j, const std::string& where) {
  if (!j.is_string()) malformed(where, "expected a string");
  return j.get<std::string>();
}

mpq_class get_rational(const json& j, const std::string& where) {
  if (j.is_number_integer()) return mpq_class(j.get<long>());
  const auto s = get_string(j, where);
  try {
    return parse_rational(s);
  } catch (const Error&) {
    malformed(where, "'" + s + "' is not a rational p/q");
  }
}

void check_version(const json& j, const std::string& where) {
  require_object(j, where);
  if (int_field(j, where, "format_version") != kFormatVersion) {
    malformed(where + ".format_version", "unsupported version (expected " + std::to_string(kFormatVersion) + ")");
  }
}

// Constructor argument errors surface as schema violations.
template <class F>
auto build(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidArgument) malformed(where, e.what());
    throw;
  }
}

// --- groups ---------------------------------------------------------------

Group parse_group(const json& j, const std::string& where) {
  require_object(j, where);
  const auto family = get_string(field(j, where, "family"), where + ".family");
  if (family == "zd") {
    allow_fields(j, where, {"family", "d"});
    const auto d = int_field(j, where, "d");
    if (d < 0) malformed(where + ".d", "dimension must be nonnegative");
    return Group::zd(static_cast<std::size_t>(d));
  }
  if (family == "cyclic") {
    allow_fields(j, where, {"family", "n"});
    const auto n = int_field(j, where, "n");
    if (n < 1) malformed(where + ".n", "order must be positive");
    return build(where, [&] { return Group::cyclic(n); });
  }
  if (family == "product") {
    allow_fields(j, where, {"family", "orders"});
    auto orders = int_list(field(j, where, "orders"), where + ".orders");
    for (auto o : orders)
      if (o < 1) malformed(where + ".orders", "orders must be positive");
    return build(where, [&] { return Group::product_of_cyclics(orders); });
  }
  if (family == "table") {
    allow_fields(j, where, {"family", "table"});
    const auto& t = field(j, where, "table");
    if (!t.is_array()) malformed(where + ".table", "expected an array of rows");
    std::vector<std::vector<std::int64_t>> rows;
    for (std::size_t i = 0; i < t.size(); ++i) rows.push_back(int_list(t[i], where + ".table[" + std::to_string(i) + "]"));
    return build(where, [&] { return Group::table(rows); });
  }
  if (family == "lamplighter") {
    allow_fields(j, where, {"family", "m"});
    const auto m = int_field(j, where, "m");
    if (m < 2) malformed(where + ".m", "lamp group order must be at least 2");
    return build(where, [&] { return Group::lamplighter(m); });
  }
  malformed(where + ".family", "unknown group family '" + family + "'");
}

ojson group_json(const Group& g) {
  ojson o;
  switch (g.family()) {
    case GroupFamily::Zd:
      o["family"] = "zd";
      o["d"] = g.dimension();
      break;
    case GroupFamily::Cyclic:
      o["family"] = "cyclic";
      o["n"] = g.orders().at(0);
      break;
    case GroupFamily::ProductOfCyclics:
      o["family"] = "product";
      o["orders"] = g.orders();
      break;
    case GroupFamily::Table:
      o["family"] = "table";
      o["table"] = g.table_entries();
      break;
    case GroupFamily::Lamplighter:
      o["family"] = "lamplighter";
      o["m"] = g.lamplighter_base();
      break;
  }
  return o;
}

// --- sequence points and arrows ---------------------------------------------

Word word_of(const std::vector<std::int64_t>& v) { return Word(v.begin(), v.end()); }
std::vector<std::int64_t> ints_of(const Word& w) { return std::vector<std::int64_t>(w.begin(), w.end()); }

SequencePoint parse_point(const json& j, const std::string& where) {
  require_object(j, where);
  if (j.contains("periodic")) {
    allow_fields(j, where, {"periodic"});
    auto w = int_list(j["periodic"], where + ".periodic");
    if (w.empty()) malformed(where + ".periodic", "word must be nonempty");
    return SequencePoint::periodic(word_of(w));
  }
  allow_fields(j, where, {"left", "start", "core", "right"});
  auto left = int_list(field(j, where, "left"), where + ".left");
  auto right = int_list(field(j, where, "right"), where + ".right");
  auto core = j.contains("core") ? int_list(j["core"], where + ".core") : std::vector<std::int64_t>{};
  auto start = j.contains("start") ? get_int(j["start"], where + ".start") : 0;
  return build(where, [&] { return SequencePoint::from_parts(word_of(left), start, word_of(core), word_of(right)); });
}

ojson point_json(const SequencePoint& x) {
  ojson o;
  if (x.is_periodic()) {
    o["periodic"] = ints_of(x.left());
    return o;
  }
  o["left"] = ints_of(x.left());
  o["start"] = x.lo();
  o["core"] = ints_of(x.core());
  o["right"] = ints_of(x.right());
  return o;
}

GroupElement parse_element_of(const json& j, const std::string& where) {
  return GroupElement{int_list(j, where)};
}

Arrow parse_arrow_json(const json& j, const GroupoidModel& model, const std::string& where) {
  require_object(j, where);
  Arrow a;
  switch (model.kind()) {
    case ModelKind::FiniteExplicit:
      allow_fields(j, where, {"id"});
      a = FiniteArrow{int_field(j, where, "id")};
      break;
    case ModelKind::Pair:
      allow_fields(j, where, {"i", "j"});
      a = PairArrow{int_field(j, where, "i"), int_field(j, where, "j")};
      break;
    case ModelKind::Group:
      if (j.contains("n")) {
        allow_fields(j, where, {"n"});
        a = GroupArrow{{{int_field(j, where, "n")}}};
      } else {
        allow_fields(j, where, {"g"});
        a = GroupArrow{parse_element_of(field(j, where, "g"), where + ".g")};
      }
      break;
    case ModelKind::GroupBundle:
      allow_fields(j, where, {"unit", "g"});
      a = BundleArrow{int_field(j, where, "unit"), parse_element_of(field(j, where, "g"), where + ".g")};
      break;
    case ModelKind::TransformationFinite:
      allow_fields(j, where, {"point", "g"});
      a = ActionArrow{int_field(j, where, "point"), parse_element_of(field(j, where, "g"), where + ".g")};
      break;
    case ModelKind::CylinderShift:
      allow_fields(j, where, {"point", "shift"});
      a = ShiftArrow{parse_point(field(j, where, "point"), where + ".point"), int_field(j, where, "shift")};
      break;
  }
  model.check_arrow(a);
  return a;
}

ojson arrow_json(const Arrow& a) {
  ojson o;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, FiniteArrow>) {
          o["id"] = x.id;
        } else if constexpr (std::is_same_v<T, PairArrow>) {
          o["i"] = x.range;
          o["j"] = x.source;
        } else if constexpr (std::is_same_v<T, GroupArrow>) {
          o["g"] = x.g.v;
        } else if constexpr (std::is_same_v<T, BundleArrow>) {
          o["unit"] = x.unit;
          o["g"] = x.g.v;
        } else if constexpr (std::is_same_v<T, ActionArrow>) {
          o["point"] = x.point;
          o["g"] = x.g.v;
        } else {
          o["point"] = point_json(x.point);
          o["shift"] = x.shift;
        }
      },
      a);
  return o;
}

ArrowBundle parse_bundle(const json& j, const std::string& where) {
  allow_fields(j, where, {"constraint", "shift"});
  Cylinder c;
  const auto& cons = field(j, where, "constraint");
  if (!cons.is_array()) malformed(where + ".constraint", "expected an array of [position, symbol] pairs");
  for (std::size_t i = 0; i < cons.size(); ++i) {
    auto pr = int_list(cons[i], where + ".constraint[" + std::to_string(i) + "]");
    if (pr.size() != 2) malformed(where + ".constraint[" + std::to_string(i) + "]", "expected [position, symbol]");
    auto [it, inserted] = c.symbols.emplace(pr[0], static_cast<Symbol>(pr[1]));
    if (!inserted && it->second != pr[1]) malformed(where + ".constraint", "conflicting symbols at one position");
  }
  return ArrowBundle{c, int_field(j, where, "shift")};
}

ojson bundle_json(const ArrowBundle& b) {
  ojson o;
  ojson cons = ojson::array();
  for (const auto& [p, s] : b.constraint.symbols) cons.push_back({p, static_cast<std::int64_t>(s)});
  o["constraint"] = cons;
  o["shift"] = b.shift;
  return o;
}

ojson unit_json(const Unit& u) {
  if (const auto* i = std::get_if<std::int64_t>(&u)) return *i;
  return point_json(std::get<SequencePoint>(u));
}

// --- coefficients -----------------------------------------------------------

ojson exact_coefficient(const Cyclotomic& c) {
  ojson o;
  if (c.order() == 1 || c.order() == 4) {
    const auto& k = c.coefficients();
    mpq_class re = k.empty() ? mpq_class(0) : k[0];
    mpq_class im = k.size() > 1 ? k[1] : mpq_class(0);
    o["re"] = rational_to_string(re);
    if (im != 0) o["im"] = rational_to_string(im);
    return o;
  }
  ojson cy;
  cy["order"] = c.order();
  ojson coeffs = ojson::array();
  for (const auto& q : c.coefficients()) coeffs.push_back(rational_to_string(q));
  cy["coeffs"] = coeffs;
  o["cyclotomic"] = cy;
  return o;
}


}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, "cannot read file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// --- models -----------------------------------------------------------------

ModelPtr parse_model(const std::string& text) {
  const json j = parse_json(text);
  const std::string w = "model";
  check_version(j, w);
  const auto kind = get_string(field(j, w, "kind"), w + ".kind");
  std::shared_ptr<GroupoidModel> m;
  if (kind == "pair") {
    allow_fields(j, w, {"format_version", "kind", "amenability", "n"});
    const auto n = int_field(j, w, "n");
    if (n < 1) malformed(w + ".n", "n must be positive");
    m = build(w, [&] { return std::make_shared<PairGroupoid>(n); });
  } else if (kind == "group") {
    allow_fields(j, w, {"format_version", "kind", "amenability", "group"});
    m = std::make_shared<GroupGroupoid>(parse_group(field(j, w, "group"), w + ".group"));
  } else if (kind == "finite") {
    allow_fields(j, w, {"format_version", "kind", "amenability", "units", "range", "source", "inverse", "compositions"});
    auto units = int_list(field(j, w, "units"), w + ".units");
    auto range = int_list(field(j, w, "range"), w + ".range");
    auto source = int_list(field(j, w, "source"), w + ".source");
    auto inverse = int_list(field(j, w, "inverse"), w + ".inverse");
    const auto& comp = field(j, w, "compositions");
    if (!comp.is_array()) malformed(w + ".compositions", "expected an array of [left, right, product]");
    std::vector<CompositionEntry> entries;
    for (std::size_t i = 0; i < comp.size(); ++i) {
      auto t = int_list(comp[i], w + ".compositions[" + std::to_string(i) + "]");
      if (t.size() != 3) malformed(w + ".compositions[" + std::to_string(i) + "]", "expected [left, right, product]");
      entries.push_back({t[0], t[1], t[2]});
    }
    m = build(w, [&] { return std::make_shared<FiniteExplicitGroupoid>(units, range, source, entries, inverse); });
  } else if (kind == "group_bundle") {
    allow_fields(j, w, {"format_version", "kind", "amenability", "groups"});
    const auto& gs = field(j, w, "groups");
    if (!gs.is_array() || gs.empty()) malformed(w + ".groups", "expected a nonempty array of groups");
    std::vector<Group> groups;
    for (std::size_t i = 0; i < gs.size(); ++i) groups.push_back(parse_group(gs[i], w + ".groups[" + std::to_string(i) + "]"));
    m = build(w, [&] { return std::make_shared<GroupBundleGroupoid>(groups); });
  } else if (kind == "transformation") {
    allow_fields(j, w, {"format_version", "kind", "amenability", "points", "group", "generators", "labels"});
    const auto points = int_field(j, w, "points");
    if (points < 1) malformed(w + ".points", "points must be positive");
    auto group = parse_group(field(j, w, "group"), w + ".group");
    const auto& gens = field(j, w, "generators");
    if (!gens.is_array()) malformed(w + ".generators", "expected an array of permutations");
    std::vector<std::vector<std::int64_t>> action;
    for (std::size_t i = 0; i < gens.size(); ++i) action.push_back(int_list(gens[i], w + ".generators[" + std::to_string(i) + "]"));
    std::vector<std::string> labels;
    if (j.contains("labels")) {
      const auto& ls = j["labels"];
      if (!ls.is_array()) malformed(w + ".labels", "expected an array of strings");
      for (std::size_t i = 0; i < ls.size(); ++i) labels.push_back(get_string(ls[i], w + ".labels[" + std::to_string(i) + "]"));
    }
    m = build(w, [&] { return std::make_shared<TransformationGroupoid>(points, group, action, labels); });
  } else if (kind == "cylinder_shift") {
    allow_fields(j, w, {"format_version", "kind", "amenability", "alphabet", "forbidden", "depth", "max_window"});
    const auto alphabet = int_field(j, w, "alphabet");
    if (alphabet < 1) malformed(w + ".alphabet", "alphabet size must be positive");
    std::vector<Word> forbidden;
    if (j.contains("forbidden")) {
      const auto& fs = j["forbidden"];
      if (!fs.is_array()) malformed(w + ".forbidden", "expected an array of words");
      for (std::size_t i = 0; i < fs.size(); ++i) {
        auto word = int_list(fs[i], w + ".forbidden[" + std::to_string(i) + "]");
        for (auto s : word)
          if (s < 0 || s >= alphabet) malformed(w + ".forbidden[" + std::to_string(i) + "]", "symbol outside the alphabet");
        forbidden.push_back(word_of(word));
      }
    }
    const auto depth = j.contains("depth") ? get_int(j["depth"], w + ".depth") : 8;
    const auto window = j.contains("max_window") ? get_int(j["max_window"], w + ".max_window") : 24;
    if (depth < 1 || window < 1) malformed(w, "depth and max_window must be positive");
    m = build(w, [&] {
      return std::make_shared<CylinderShiftGroupoid>(Subshift(static_cast<int>(alphabet), forbidden),
                                                     static_cast<std::size_t>(depth), static_cast<std::size_t>(window));
    });
  } else {
    malformed(w + ".kind", "unknown model kind '" + kind + "'");
  }
  if (j.contains("amenability")) {
    const auto a = get_string(j["amenability"], w + ".amenability");
    if (a == "derive") m->set_amenability(AmenabilityMode::Derive);
    else if (a == "asserted") m->set_amenability(AmenabilityMode::Asserted);
    else if (a == "unknown") m->set_amenability(AmenabilityMode::Withheld);
    else malformed(w + ".amenability", "expected \"derive\", \"asserted\" or \"unknown\"");
  }
  return m;
}

ModelPtr load_model_file(const std::string& path) { return parse_model(read_text_file(path)); }

std::string serialize_model(const GroupoidModel& model) {
  ojson o;
  o["format_version"] = kFormatVersion;
  o["kind"] = to_string(model.kind());
  switch (model.kind()) {
    case ModelKind::Pair: o["n"] = dynamic_cast<const PairGroupoid&>(model).size(); break;
    case ModelKind::Group: o["group"] = group_json(dynamic_cast<const GroupGroupoid&>(model).group()); break;
    case ModelKind::FiniteExplicit: {
      const auto& f = dynamic_cast<const FiniteExplicitGroupoid&>(model);
      o["units"] = f.unit_ids();
      o["range"] = f.range_table();
      o["source"] = f.source_table();
      o["inverse"] = f.inverse_table();
      ojson comp = ojson::array();
      for (const auto& e : f.composition_entries()) comp.push_back({e.left, e.right, e.product});
      o["compositions"] = comp;
      break;
    }
    case ModelKind::GroupBundle: {
      ojson gs = ojson::array();
      for (const auto& g : dynamic_cast<const GroupBundleGroupoid&>(model).groups()) gs.push_back(group_json(g));
      o["groups"] = gs;
      break;
    }
    case ModelKind::TransformationFinite: {
      const auto& t = dynamic_cast<const TransformationGroupoid&>(model);
      o["points"] = t.point_count();
      o["group"] = group_json(t.group());
      o["generators"] = t.generator_action();
      if (!t.labels().empty()) o["labels"] = t.labels();
      break;
    }
    case ModelKind::CylinderShift: {
      const auto& c = dynamic_cast<const CylinderShiftGroupoid&>(model);
      o["alphabet"] = c.subshift().alphabet();
      ojson fs = ojson::array();
      for (const auto& w : c.subshift().forbidden()) fs.push_back(ints_of(w));
      o["forbidden"] = fs;
      o["depth"] = c.depth();
      o["max_window"] = c.max_window();
      break;
    }
  }
  if (model.amenability() == AmenabilityMode::Asserted) o["amenability"] = "asserted";
  if (model.amenability() == AmenabilityMode::Withheld) o["amenability"] = "unknown";
  return o.dump(2) + "\n";
}

// --- cocycles ---------------------------------------------------------------

namespace {

TwoCocycle parse_cocycle_json(const json& j, const ModelPtr& model, const std::string& w, bool top) {
  require_object(j, w);
  const auto kind = get_string(field(j, w, "kind"), w + ".kind");
  auto fields = [&](std::initializer_list<const char*> extra) {
    std::vector<const char*> all(extra);
    all.push_back("kind");
    if (top) all.push_back("format_version");
    std::set<std::string> ok(all.begin(), all.end());
    for (const auto& [k, v] : j.items())
      if (!ok.count(k)) malformed(w, "unknown field '" + k + "'");
  };
  if (kind == "trivial") {
    fields({});
    return TwoCocycle::trivial(model);
  }
  if (kind == "table") {
    fields({"denominator", "entries"});
    const auto m = int_field(j, w, "denominator");
    if (m < 1) malformed(w + ".denominator", "denominator must be positive");
    const auto& es = field(j, w, "entries");
    if (!es.is_array()) malformed(w + ".entries", "expected an array");
    std::map<std::pair<Arrow, Arrow>, Phase> entries;
    for (std::size_t i = 0; i < es.size(); ++i) {
      const auto wi = w + ".entries[" + std::to_string(i) + "]";
      allow_fields(es[i], wi, {"left", "right", "value"});
      auto l = parse_arrow_json(field(es[i], wi, "left"), *model, wi + ".left");
      auto r = parse_arrow_json(field(es[i], wi, "right"), *model, wi + ".right");
      const auto q = get_rational(field(es[i], wi, "value"), wi + ".value");
      auto [it, inserted] = entries.emplace(std::pair{l, r}, Phase::from_rational(q));
      if (!inserted) malformed(wi, "duplicate entry");
    }
    return TwoCocycle::finite_table(model, entries, m);
  }
  if (kind == "bicharacter") {
    fields({"theta"});
    const auto& t = field(j, w, "theta");
    if (!t.is_array()) malformed(w + ".theta", "expected a matrix of rationals");
    RationalMatrix theta;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (!t[i].is_array()) malformed(w + ".theta", "expected a matrix of rationals");
      std::vector<mpq_class> row;
      for (std::size_t k = 0; k < t[i].size(); ++k)
        row.push_back(get_rational(t[i][k], w + ".theta[" + std::to_string(i) + "][" + std::to_string(k) + "]"));
      theta.push_back(row);
    }
    return TwoCocycle::bicharacter(model, theta);
  }
  if (kind == "pullback") {
    fields({"group", "cocycle"});
    auto group = std::make_shared<GroupGroupoid>(parse_group(field(j, w, "group"), w + ".group"));
    auto inner = parse_cocycle_json(field(j, w, "cocycle"), group, w + ".cocycle", false);
    return TwoCocycle::pullback(model, inner);
  }
  malformed(w + ".kind", "unknown cocycle kind '" + kind + "'");
}

ojson cocycle_json(const TwoCocycle& s) {
  ojson o;
  switch (s.kind()) {
    case CocycleKind::Trivial: o["kind"] = "trivial"; break;
    case CocycleKind::FiniteTable: {
      o["kind"] = "table";
      o["denominator"] = s.denominator();
      ojson es = ojson::array();
      for (const auto& [k, p] : s.table_entries()) {
        ojson e;
        e["left"] = arrow_json(k.first);
        e["right"] = arrow_json(k.second);
        e["value"] = p.to_string();
        es.push_back(e);
      }
      o["entries"] = es;
      break;
    }
    case CocycleKind::Bicharacter: {
      o["kind"] = "bicharacter";
      ojson t = ojson::array();
      for (const auto& row : s.theta()) {
        ojson r = ojson::array();
        for (const auto& q : row) r.push_back(rational_to_string(q));
        t.push_back(r);
      }
      o["theta"] = t;
      break;
    }
    case CocycleKind::Pullback: {
      o["kind"] = "pullback";
      o["group"] = group_json(dynamic_cast<const GroupGroupoid&>(s.group_cocycle().groupoid()).group());
      o["cocycle"] = cocycle_json(s.group_cocycle());
      break;
    }
    case CocycleKind::Restriction:
      throw Error(ErrorKind::UnsupportedModel, "restricted cocycles have no file form");
  }
  return o;
}

}  // namespace

TwoCocycle parse_cocycle(const std::string& text, const ModelPtr& model) {
  const json j = parse_json(text);
  check_version(j, "cocycle");
  return parse_cocycle_json(j, model, "cocycle", true);
}

TwoCocycle load_cocycle_file(const std::string& path, const ModelPtr& model) {
  return parse_cocycle(read_text_file(path), model);
}

std::string serialize_cocycle(const TwoCocycle& sigma) {
  ojson o;
  o["format_version"] = kFormatVersion;
  const auto body = cocycle_json(sigma);
  for (const auto& [k, v] : body.items()) o[k] = v;
  return o.dump(2) + "\n";
}

// --- elements ---------------------------------------------------------------

ParsedElement parse_element(const std::string& text, const ModelPtr& model) {
  const json j = parse_json(text);
  const std::string w = "element";
  check_version(j, w);
  allow_fields(j, w, {"format_version", "terms"});
  const auto& terms = field(j, w, "terms");
  if (!terms.is_array()) malformed(w + ".terms", "expected an array");
  ParsedElement out{true, Element(model), FloatElement(model)};
  const bool cylinder = model->kind() == ModelKind::CylinderShift;
  struct Raw {
    Support support;
    std::optional<Cyclotomic> exact;
    std::complex<double> value;
  };
  std::vector<Raw> raws;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto wi = w + ".terms[" + std::to_string(i) + "]";
    allow_fields(terms[i], wi, {"arrow", "bundle", "re", "im", "phase", "cyclotomic"});
    const auto& t = terms[i];
    Support s;
    if (t.contains("bundle") == t.contains("arrow")) malformed(wi, "exactly one of 'arrow' or 'bundle' is required");
    if (t.contains("bundle")) {
      if (!cylinder) malformed(wi + ".bundle", "bundles are only defined on cylinder models");
      s = parse_bundle(t["bundle"], wi + ".bundle");
    } else {
      if (cylinder) malformed(wi + ".arrow", "cylinder elements are given by bundles");
      s = parse_arrow_json(t["arrow"], *model, wi + ".arrow");
    }
    bool exact = true;
    for (const char* k : {"re", "im"})
      if (t.contains(k) && t[k].is_number_float()) exact = false;
    Raw r{s, std::nullopt, {}};
    if (exact) {
      Cyclotomic c = Cyclotomic::gaussian(t.contains("re") ? get_rational(t["re"], wi + ".re") : mpq_class(0),
                                          t.contains("im") ? get_rational(t["im"], wi + ".im") : mpq_class(0));
      if (t.contains("cyclotomic")) {
        const auto wc = wi + ".cyclotomic";
        allow_fields(t["cyclotomic"], wc, {"order", "coeffs"});
        const auto n = int_field(t["cyclotomic"], wc, "order");
        if (n < 1 || n > Cyclotomic::kMaxOrder) malformed(wc + ".order", "order out of range");
        const auto& cs = field(t["cyclotomic"], wc, "coeffs");
        if (!cs.is_array()) malformed(wc + ".coeffs", "expected an array of rationals");
        for (std::size_t k = 0; k < cs.size(); ++k)
          c += Cyclotomic(get_rational(cs[k], wc + ".coeffs[" + std::to_string(k) + "]"))
                   .times(Phase(static_cast<std::int64_t>(k), n));
      }
      if (!t.contains("re") && !t.contains("im") && !t.contains("cyclotomic")) c = Cyclotomic(1);
      if (t.contains("phase")) c = c.times(Phase::from_rational(get_rational(t["phase"], wi + ".phase")));
      r.exact = c;
      r.value = c.to_complex();
    } else {
      if (t.contains("cyclotomic")) malformed(wi, "floating coefficients cannot be combined with 'cyclotomic'");
      auto num = [&](const char* k) -> double {
        if (!t.contains(k)) return 0.0;
        if (t[k].is_number()) return t[k].get<double>();
        return get_rational(t[k], wi + "." + k).get_d();
      };
      r.value = {num("re"), num("im")};
      if (t.contains("phase")) r.value *= Phase::from_rational(get_rational(t["phase"], wi + ".phase")).to_complex();
      out.is_exact = false;
    }
    raws.push_back(std::move(r));
  }
  for (const auto& r : raws) {
    if (out.is_exact) out.exact.add(r.support, *r.exact);
    out.numeric.add(r.support, r.value);
  }
  return out;
}

ParsedElement load_element_file(const std::string& path, const ModelPtr& model) {
  return parse_element(read_text_file(path), model);
}

namespace {

ojson support_json_obj(const Support& s) {
  ojson o;
  if (const auto* b = std::get_if<ArrowBundle>(&s)) o["bundle"] = bundle_json(*b);
  else o["arrow"] = arrow_json(std::get<Arrow>(s));
  return o;
}

}  // namespace

std::string serialize_element(const Element& f) {
  ojson o;
  o["format_version"] = kFormatVersion;
  ojson terms = ojson::array();
  for (const auto& [s, c] : f.terms()) {
    ojson t = support_json_obj(s);
    const auto coeff = exact_coefficient(c);
    for (const auto& [k, v] : coeff.items()) t[k] = v;
    terms.push_back(t);
  }
  o["terms"] = terms;
  return o.dump(2) + "\n";
}

std::string serialize_element(const FloatElement& f) {
  ojson o;
  o["format_version"] = kFormatVersion;
  ojson terms = ojson::array();
  for (const auto& [s, c] : f.terms()) {
    ojson t = support_json_obj(s);
    t["re"] = c.real();
    t["im"] = c.imag();
    terms.push_back(t);
  }
  o["terms"] = terms;
  return o.dump(2) + "\n";
}

std::string arrow_to_json(const Arrow& a) { return arrow_json(a).dump(); }
std::string unit_to_json(const Unit& u) { return unit_json(u).dump(); }
std::string support_to_json(const Support& s) { return support_json_obj(s).dump(); }

Arrow parse_arrow(const std::string& text, const GroupoidModel& model) {
  return parse_arrow_json(parse_json(text), model, "arrow");
}

}  // namespace etale
