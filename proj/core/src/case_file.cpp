#include "scfault/case_file.hpp"

#include <algorithm>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "scfault/blackbox.hpp"

namespace scfault {

namespace {

using nlohmann::json;

// Object view that rejects unknown keys and reports the section path.
class Section {
 public:
  Section(const json& j, std::string path, std::initializer_list<const char*> keys, const std::string& origin)
      : j_(j), path_(std::move(path)), origin_(origin) {
    if (!j_.is_object()) fail("expected an object");
    for (const auto& [key, value] : j_.items()) {
      if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; }))
        fail("unknown key '" + key + "'");
    }
  }

  [[noreturn]] void fail(const std::string& what) const { throw CaseParseError(origin_, path_, what); }
  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  bool has(const char* key) const { return j_.contains(key); }
  const json& raw(const char* key) const {
    if (!has(key)) fail(std::string("missing key '") + key + "'");
    return j_.at(key);
  }

  double number(const char* key) const {
    const json& v = raw(key);
    if (!v.is_number()) throw CaseParseError(origin_, at(key), "expected a number");
    return v.get<double>();
  }
  double number(const char* key, double fallback) const { return has(key) ? number(key) : fallback; }

  std::string text(const char* key) const {
    const json& v = raw(key);
    if (!v.is_string()) throw CaseParseError(origin_, at(key), "expected a string");
    return v.get<std::string>();
  }
  std::string text(const char* key, const std::string& fallback) const { return has(key) ? text(key) : fallback; }

  // "z<s>": [r, x] or "r<s>"/"x<s>" numbers.
  std::optional<Impedance> impedance(const std::string& s) const {
    const std::string zk = "z" + s, rk = "r" + s, xk = "x" + s;
    const bool split = j_.contains(rk) || j_.contains(xk);
    if (j_.contains(zk)) {
      if (split) fail("give either " + zk + " or " + rk + "/" + xk + ", not both");
      return complex_pair(j_.at(zk), at(zk));
    }
    if (!split) return std::nullopt;
    if (!j_.contains(xk)) fail(rk + " needs " + xk);
    const double r = j_.contains(rk) ? number(rk.c_str()) : 0.0;
    return Impedance{r, number(xk.c_str())};
  }

  Impedance complex_pair(const json& v, const std::string& where) const {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      throw CaseParseError(origin_, where, "expected [real, imag]");
    return {v[0].get<double>(), v[1].get<double>()};
  }

  const std::string& path() const { return path_; }
  const std::string& origin() const { return origin_; }

 private:
  const json& j_;
  std::string path_;
  const std::string& origin_;
};

const json& array_at(const Section& s, const char* key) {
  const json& v = s.raw(key);
  if (!v.is_array()) throw CaseParseError(s.origin(), s.at(key), "expected an array");
  return v;
}

std::string indexed(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

struct SequenceImpedances {
  Impedance z1, z2, z0;
};

SequenceImpedances impedances(const Section& s) {
  auto z1 = s.impedance("1");
  if (!z1) s.fail("missing positive-sequence impedance (x1, r1/x1 or z1)");
  SequenceImpedances z{*z1, *z1, *z1};
  if (auto z2 = s.impedance("2")) z.z2 = *z2;
  if (auto z0 = s.impedance("0")) z.z0 = *z0;
  return z;
}

IbrModelPtr parse_model(const json& j, const std::string& path, const std::string& origin) {
  Section m(j, path, {"tabular", "kfactor", "blackbox"}, origin);
  const int kinds = int(m.has("tabular")) + int(m.has("kfactor")) + int(m.has("blackbox"));
  if (kinds != 1) m.fail("expected exactly one of tabular, kfactor, blackbox");

  if (m.has("tabular")) {
    Section t(m.raw("tabular"), m.at("tabular"), {"rows"}, origin);
    const json& rows = array_at(t, "rows");
    std::vector<VccsRow> out;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const json& row = rows[r];
      const std::string where = indexed(t.at("rows"), r);
      if (!row.is_array() || row.size() != 3 || !row[0].is_number() || !row[1].is_number() || !row[2].is_number())
        throw CaseParseError(origin, where, "expected [v_pu, i_pu, rel_angle_deg]");
      out.push_back({row[0].get<double>(), row[1].get<double>(), row[2].get<double>()});
    }
    try {
      return std::make_shared<VccsModel>(VccsTable(std::move(out)));
    } catch (const std::invalid_argument& e) {
      throw CaseParseError(origin, t.at("rows"), e.what());
    }
  }
  if (m.has("kfactor")) {
    Section k(m.raw("kfactor"), m.at("kfactor"), {"k1", "k2", "v_ref", "i_max", "i_p0"}, origin);
    KFactorParams p;
    p.k1 = k.number("k1");
    p.k2 = k.number("k2");
    p.v_ref = k.number("v_ref", 1.0);
    p.i_max = k.number("i_max");
    p.i_active_prefault = k.number("i_p0");
    try {
      return std::make_shared<KFactorModel>(p);
    } catch (const std::invalid_argument& e) {
      k.fail(e.what());
    }
  }
  Section b(m.raw("blackbox"), m.at("blackbox"), {"command", "i_p0"}, origin);
  try {
    return std::make_shared<BlackBoxModel>(b.text("command"), b.number("i_p0", 0.0));
  } catch (const std::invalid_argument& e) {
    b.fail(e.what());
  }
}

std::pair<std::size_t, std::size_t> line_and_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

CaseParseError::CaseParseError(const std::string& origin, const std::string& where, const std::string& what)
    : CaseError(origin + ": " + (where.empty() ? std::string("document") : where) + ": " + what), where_(where) {}

const FaultSpec& LoadedCase::fault(const std::string& name) const {
  for (const FaultSpec& f : faults)
    if (f.name == name) return f;
  std::string known;
  for (const FaultSpec& f : faults) known += (known.empty() ? "" : ", ") + f.name;
  throw CaseError("unknown fault '" + name + "' (case defines: " + known + ")");
}

LoadedCase parse_case(std::string_view text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_and_column(text, e.byte > 0 ? e.byte - 1 : 0);
    throw CaseParseError(origin, "line " + std::to_string(line) + ", column " + std::to_string(col), e.what());
  }

  Section top(doc, "", {"name", "description", "notes", "system_base", "buses", "branches", "sources", "ibrs", "faults"},
              origin);
  LoadedCase out;
  NetworkCase& c = out.network;
  c.name = top.text("name", origin);
  c.description = top.text("description", "");
  if (top.has("notes")) {
    const json& notes = array_at(top, "notes");
    for (std::size_t i = 0; i < notes.size(); ++i)
      if (!notes[i].is_string()) throw CaseParseError(origin, indexed("notes", i), "expected a string");
  }

  Section base(top.raw("system_base"), "system_base", {"mva", "kv"}, origin);
  try {
    c.system_base = PerUnitBase(base.number("mva"), base.number("kv"));
  } catch (const std::invalid_argument& e) {
    base.fail(e.what());
  }

  const json& buses = array_at(top, "buses");
  for (std::size_t i = 0; i < buses.size(); ++i) {
    if (!buses[i].is_string()) throw CaseParseError(origin, indexed("buses", i), "expected a bus name");
    c.buses.push_back(buses[i].get<std::string>());
  }

  std::vector<std::string> branch_names;
  if (top.has("branches")) {
    const json& branches = array_at(top, "branches");
    for (std::size_t i = 0; i < branches.size(); ++i) {
      Section b(branches[i], indexed("branches", i), {"name", "from", "to", "r1", "x1", "z1", "r2", "x2", "z2", "r0", "x0", "z0"},
                origin);
      const SequenceImpedances z = impedances(b);
      c.branches.push_back({b.text("from"), b.text("to"), z.z1, z.z2, z.z0});
      branch_names.push_back(b.text("name", ""));
    }
  }

  const json& sources = array_at(top, "sources");
  for (std::size_t i = 0; i < sources.size(); ++i) {
    Section s(sources[i], indexed("sources", i),
              {"bus", "v_mag", "v_angle_deg", "r1", "x1", "z1", "r2", "x2", "z2", "r0", "x0", "z0"}, origin);
    const SequenceImpedances z = impedances(s);
    const double mag = s.number("v_mag");
    if (mag < 0.0) s.fail("v_mag must be >= 0");
    c.sources.push_back({s.text("bus"), polar(mag, s.number("v_angle_deg", 0.0)), z.z1, z.z2, z.z0});
  }

  if (top.has("ibrs")) {
    const json& ibrs = array_at(top, "ibrs");
    for (std::size_t i = 0; i < ibrs.size(); ++i) {
      const std::string path = indexed("ibrs", i);
      Section r(ibrs[i], path, {"name", "bus", "base_mva", "base_kv", "model"}, origin);
      IbrAttachment a;
      a.bus = r.text("bus");
      a.name = r.text("name", a.bus);
      try {
        a.base = PerUnitBase(r.number("base_mva"), r.number("base_kv", c.system_base.v_kv));
      } catch (const std::invalid_argument& e) {
        r.fail(e.what());
      }
      a.model = parse_model(r.raw("model"), r.at("model"), origin);
      c.ibrs.push_back(std::move(a));
    }
  }

  const json& faults = array_at(top, "faults");
  for (std::size_t i = 0; i < faults.size(); ++i) {
    Section f(faults[i], indexed("faults", i), {"name", "location", "kind", "z_fault"}, origin);
    FaultSpec spec;
    spec.name = f.text("name");
    const auto kind = parse_fault_kind(f.text("kind"));
    if (!kind) throw CaseParseError(origin, f.at("kind"), "unsupported fault kind (use 3PG, LLG, LL, SLG or none)");
    spec.kind = *kind;
    if (f.has("z_fault")) spec.z_fault = f.complex_pair(f.raw("z_fault"), f.at("z_fault"));
    if (spec.z_fault.real() < 0.0) throw CaseParseError(origin, f.at("z_fault"), "real part must be >= 0");

    if (spec.kind != FaultKind::none || f.has("location")) {
      Section loc(f.raw("location"), f.at("location"), {"bus", "branch", "position"}, origin);
      if (loc.has("bus") == loc.has("branch")) loc.fail("give exactly one of bus or branch");
      if (loc.has("bus")) {
        spec.location.bus = loc.text("bus");
        if (loc.has("position")) loc.fail("position only applies to a branch");
      } else {
        const std::string name = loc.text("branch");
        auto it = std::find(branch_names.begin(), branch_names.end(), name);
        if (name.empty() || it == branch_names.end()) loc.fail("unknown branch '" + name + "'");
        spec.location.branch = static_cast<std::size_t>(it - branch_names.begin());
        spec.location.position = loc.number("position", 0.5);
        if (!(spec.location.position >= 0.0 && spec.location.position <= 1.0)) loc.fail("position must lie in [0, 1]");
      }
    }
    for (const FaultSpec& other : out.faults)
      if (other.name == spec.name) f.fail("duplicate fault name '" + spec.name + "'");
    out.faults.push_back(std::move(spec));
  }

  try {
    c.validate();
  } catch (const CaseError& e) {
    throw CaseParseError(origin, "network", e.what());
  }
  for (const FaultSpec& spec : out.faults)
    if (!spec.location.branch && spec.kind != FaultKind::none && !c.find_bus(spec.location.bus))
      throw CaseParseError(origin, "faults", "fault '" + spec.name + "' names unknown bus '" + spec.location.bus + "'");
  return out;
}

LoadedCase load_case(const std::string& name_or_path) {
  if (auto text = fixture_text(name_or_path)) return parse_case(*text, name_or_path);
  std::ifstream in(name_or_path);
  if (!in) throw CaseError("cannot open case '" + name_or_path + "' (not a file and not an embedded fixture)");
  std::ostringstream body;
  body << in.rdbuf();
  return parse_case(body.str(), name_or_path);
}

}  // namespace scfault
