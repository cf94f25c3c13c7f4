#include "scfault/network.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

namespace scfault {

namespace {

bool usable_impedance(Impedance z) { return std::isfinite(z.real()) && std::isfinite(z.imag()) && z != Impedance{}; }

Impedance pick(const Branch& b, Sequence s) {
  switch (s) {
    case Sequence::positive: return b.z1;
    case Sequence::negative: return b.z2;
    default: return b.z0;
  }
}

Impedance pick(const Source& src, Sequence s) {
  switch (s) {
    case Sequence::positive: return src.z1;
    case Sequence::negative: return src.z2;
    default: return src.z0;
  }
}

std::vector<Sequence> sequences_for(FaultKind k) {
  switch (k) {
    case FaultKind::three_phase:
    case FaultKind::none: return {Sequence::positive};
    case FaultKind::ll: return {Sequence::positive, Sequence::negative};
    case FaultKind::llg:
    case FaultKind::slg: return {Sequence::positive, Sequence::negative, Sequence::zero};
  }
  throw std::invalid_argument("unsupported fault kind");
}

std::string format_position(double p) {
  std::ostringstream os;
  os << p;
  return os.str();
}

// Bus list and branch list after resolving the fault location. A fault inside
// a branch splits it in two segments joined by a new bus.
struct ResolvedTopology {
  std::vector<std::string> buses;
  std::vector<Branch> branches;
  std::optional<std::size_t> fault_bus;
};

ResolvedTopology resolve(const NetworkCase& c, const FaultSpec& fault) {
  ResolvedTopology t{c.buses, c.branches, std::nullopt};
  if (fault.kind == FaultKind::none) return t;
  if (!(fault.z_fault.real() >= 0.0) || !std::isfinite(fault.z_fault.imag()))
    throw CaseError("fault '" + fault.name + "': fault impedance needs a nonnegative real part");

  const FaultLocation& loc = fault.location;
  if (!loc.branch) {
    auto idx = c.find_bus(loc.bus);
    if (!idx) throw CaseError("fault '" + fault.name + "': unknown bus '" + loc.bus + "'");
    t.fault_bus = *idx;
    return t;
  }
  if (*loc.branch >= c.branches.size()) throw CaseError("fault '" + fault.name + "': branch index out of range");
  if (!(loc.position >= 0.0 && loc.position <= 1.0))
    throw CaseError("fault '" + fault.name + "': branch position must lie in [0, 1]");

  const Branch& b = c.branches[*loc.branch];
  if (loc.position == 0.0) {
    t.fault_bus = *c.find_bus(b.from);
    return t;
  }
  if (loc.position == 1.0) {
    t.fault_bus = *c.find_bus(b.to);
    return t;
  }
  const double p = loc.position;
  const std::string mid = b.from + "-" + b.to + "@" + format_position(p);
  t.buses.push_back(mid);
  t.fault_bus = t.buses.size() - 1;
  t.branches.erase(t.branches.begin() + static_cast<std::ptrdiff_t>(*loc.branch));
  t.branches.push_back({b.from, mid, b.z1 * p, b.z2 * p, b.z0 * p});
  t.branches.push_back({mid, b.to, b.z1 * (1.0 - p), b.z2 * (1.0 - p), b.z0 * (1.0 - p)});
  return t;
}

std::size_t index_of(const std::vector<std::string>& names, const std::string& name) {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw CaseError("unknown bus '" + name + "'");
  return static_cast<std::size_t>(it - names.begin());
}

// Null-space direction of a singular matrix, mapped back to a bus name.
std::string suspect_bus(const Eigen::FullPivLU<Eigen::MatrixXcd>& lu, const std::vector<std::string>& buses,
                        std::size_t nb) {
  const Eigen::MatrixXcd k = lu.kernel();
  if (k.cols() == 0 || nb == 0) return {};
  Eigen::Index row = 0;
  k.col(0).cwiseAbs().maxCoeff(&row);
  return buses[static_cast<std::size_t>(row) % nb];
}

}  // namespace

const char* to_string(FaultKind k) {
  switch (k) {
    case FaultKind::three_phase: return "3PG";
    case FaultKind::llg: return "LLG";
    case FaultKind::ll: return "LL";
    case FaultKind::slg: return "SLG";
    case FaultKind::none: return "none";
  }
  return "?";
}

std::optional<FaultKind> parse_fault_kind(const std::string& text) {
  if (text == "3PG") return FaultKind::three_phase;
  if (text == "LLG") return FaultKind::llg;
  if (text == "LL") return FaultKind::ll;
  if (text == "SLG") return FaultKind::slg;
  if (text == "none") return FaultKind::none;
  return std::nullopt;
}

FaultSpec FaultSpec::at_bus(std::string bus, FaultKind kind, Impedance z) {
  FaultSpec f;
  f.name = bus;
  f.location.bus = std::move(bus);
  f.kind = kind;
  f.z_fault = z;
  return f;
}

FaultSpec FaultSpec::none() {
  FaultSpec f;
  f.name = "none";
  return f;
}

std::optional<std::size_t> NetworkCase::find_bus(const std::string& bus) const {
  auto it = std::find(buses.begin(), buses.end(), bus);
  if (it == buses.end()) return std::nullopt;
  return static_cast<std::size_t>(it - buses.begin());
}

double NetworkCase::current_scale(std::size_t ibr) const {
  return base_ratio(Quantity::current, ibrs.at(ibr).base, system_base);
}

void NetworkCase::validate() const {
  if (buses.empty()) throw CaseError("case has no buses");
  for (std::size_t i = 0; i < buses.size(); ++i) {
    if (buses[i].empty()) throw CaseError("bus " + std::to_string(i + 1) + " has an empty name");
    for (std::size_t j = 0; j < i; ++j)
      if (buses[i] == buses[j]) throw CaseError("duplicate bus '" + buses[i] + "'");
  }
  if (sources.empty()) throw CaseError("case has no ideal source, so no Thevenin voltage exists");

  std::vector<std::vector<std::size_t>> adj(buses.size());
  for (std::size_t k = 0; k < branches.size(); ++k) {
    const Branch& b = branches[k];
    const std::string tag = "branch " + std::to_string(k + 1) + " (" + b.from + "-" + b.to + ")";
    auto f = find_bus(b.from);
    auto t = find_bus(b.to);
    if (!f) throw CaseError(tag + ": unknown bus '" + b.from + "'");
    if (!t) throw CaseError(tag + ": unknown bus '" + b.to + "'");
    if (*f == *t) throw CaseError(tag + ": both ends on the same bus");
    if (!usable_impedance(b.z1) || !usable_impedance(b.z2) || !usable_impedance(b.z0))
      throw CaseError(tag + ": series impedances must be finite and nonzero");
    adj[*f].push_back(*t);
    adj[*t].push_back(*f);
  }

  std::vector<bool> energized(buses.size(), false);
  std::queue<std::size_t> todo;
  for (std::size_t k = 0; k < sources.size(); ++k) {
    const Source& s = sources[k];
    auto b = find_bus(s.bus);
    if (!b) throw CaseError("source " + std::to_string(k + 1) + ": unknown bus '" + s.bus + "'");
    if (!usable_impedance(s.z1) || !usable_impedance(s.z2) || !usable_impedance(s.z0))
      throw CaseError("source " + std::to_string(k + 1) + ": impedances must be finite and nonzero");
    if (!std::isfinite(s.v.real()) || !std::isfinite(s.v.imag()))
      throw CaseError("source " + std::to_string(k + 1) + ": voltage is not finite");
    if (!energized[*b]) {
      energized[*b] = true;
      todo.push(*b);
    }
  }
  while (!todo.empty()) {
    const std::size_t b = todo.front();
    todo.pop();
    for (std::size_t n : adj[b])
      if (!energized[n]) {
        energized[n] = true;
        todo.push(n);
      }
  }
  for (std::size_t i = 0; i < buses.size(); ++i)
    if (!energized[i]) throw CaseError("bus '" + buses[i] + "' is isolated (no path to any source)");

  for (std::size_t k = 0; k < ibrs.size(); ++k) {
    const IbrAttachment& ibr = ibrs[k];
    const std::string tag = "ibr " + std::to_string(k + 1) + (ibr.name.empty() ? "" : " (" + ibr.name + ")");
    if (!find_bus(ibr.bus)) throw CaseError(tag + ": unknown bus '" + ibr.bus + "'");
    if (!ibr.model) throw CaseError(tag + ": no model");
    if (!(ibr.base.s_mva > 0.0 && ibr.base.v_kv > 0.0)) throw CaseError(tag + ": invalid unit base");
    for (std::size_t j = 0; j < k; ++j)
      if (ibrs[j].bus == ibr.bus) throw CaseError(tag + ": bus '" + ibr.bus + "' already hosts an IBR");
  }
}

SequenceNetwork assemble_admittance(const NetworkCase& c, Sequence seq, const FaultSpec& fault) {
  ResolvedTopology t = resolve(c, fault);
  const auto n = static_cast<Eigen::Index>(t.buses.size());
  SequenceNetwork net{t.buses, Eigen::MatrixXcd::Zero(n, n), Eigen::VectorXcd::Zero(n), t.fault_bus};

  for (const Branch& b : t.branches) {
    const Impedance z = pick(b, seq);
    if (!usable_impedance(z)) throw NetworkError("zero series impedance between " + b.from + " and " + b.to, b.from);
    const Admittance y = 1.0 / z;
    const auto i = static_cast<Eigen::Index>(index_of(t.buses, b.from));
    const auto j = static_cast<Eigen::Index>(index_of(t.buses, b.to));
    net.y(i, i) += y;
    net.y(j, j) += y;
    net.y(i, j) -= y;
    net.y(j, i) -= y;
  }
  for (const Source& s : c.sources) {
    const Impedance z = pick(s, seq);
    const auto i = static_cast<Eigen::Index>(index_of(t.buses, s.bus));
    net.y(i, i) += 1.0 / z;
    if (seq == Sequence::positive) net.injection(i) += s.v / z;
  }
  return net;
}

FaultNetwork::FaultNetwork(const NetworkCase& c, const FaultSpec& fault) : sequences_(sequences_for(fault.kind)) {
  ResolvedTopology t = resolve(c, fault);
  buses_ = t.buses;
  fault_bus_ = t.fault_bus;
  nb_ = buses_.size();

  const std::size_t ns = sequences_.size();
  const std::size_t nf = fault.kind == FaultKind::none ? 0 : ns;
  const auto n = static_cast<Eigen::Index>(ns * nb_ + nf);
  a_ = Eigen::MatrixXcd::Zero(n, n);
  b_ = Eigen::VectorXcd::Zero(n);

  for (std::size_t s = 0; s < ns; ++s) {
    SequenceNetwork sn = assemble_admittance(c, sequences_[s], fault);
    const auto off = static_cast<Eigen::Index>(s * nb_);
    const auto nbi = static_cast<Eigen::Index>(nb_);
    a_.block(off, off, nbi, nbi) = sn.y;
    b_.segment(off, nbi) = sn.injection;
  }

  if (nf > 0) {
    const auto f = static_cast<Eigen::Index>(*fault_bus_);
    const auto nbi = static_cast<Eigen::Index>(nb_);
    const auto cur = static_cast<Eigen::Index>(ns * nb_);  // first fault-current column
    for (std::size_t s = 0; s < ns; ++s) a_(static_cast<Eigen::Index>(s) * nbi + f, cur + static_cast<Eigen::Index>(s)) = 1.0;

    const Impedance zf = fault.z_fault;
    const Eigen::Index v1 = f, v2 = nbi + f, v0 = 2 * nbi + f;
    const Eigen::Index i1 = cur, i2 = cur + 1, i0 = cur + 2;
    const Eigen::Index r = cur;  // constraint rows share the fault-current range
    switch (fault.kind) {
      case FaultKind::three_phase:
        a_(r, v1) = 1.0;
        a_(r, i1) = -zf;
        break;
      case FaultKind::ll:
        a_(r, i1) = 1.0;
        a_(r, i2) = 1.0;
        a_(r + 1, v1) = 1.0;
        a_(r + 1, v2) = -1.0;
        a_(r + 1, i1) = -zf;
        break;
      case FaultKind::llg:
        a_(r, i1) = 1.0;
        a_(r, i2) = 1.0;
        a_(r, i0) = 1.0;
        a_(r + 1, v1) = 1.0;
        a_(r + 1, v2) = -1.0;
        a_(r + 2, v0) = 1.0;
        a_(r + 2, v1) = -1.0;
        a_(r + 2, i0) = -3.0 * zf;
        break;
      case FaultKind::slg:
        a_(r, i1) = 1.0;
        a_(r, i2) = -1.0;
        a_(r + 1, i2) = 1.0;
        a_(r + 1, i0) = -1.0;
        a_(r + 2, v1) = 1.0;
        a_(r + 2, v2) = 1.0;
        a_(r + 2, v0) = 1.0;
        a_(r + 2, i1) = -3.0 * zf;
        break;
      case FaultKind::none: break;
    }
  }

  Eigen::FullPivLU<Eigen::MatrixXcd> check(a_);
  if (!check.isInvertible())
    throw NetworkError("singular network matrix", suspect_bus(check, buses_, nb_));
  lu_.compute(a_);
}

bool FaultNetwork::has(Sequence s) const {
  return std::find(sequences_.begin(), sequences_.end(), s) != sequences_.end();
}

std::size_t FaultNetwork::bus(const std::string& name) const { return index_of(buses_, name); }

std::size_t FaultNetwork::unknown(std::size_t bus, Sequence s) const {
  auto it = std::find(sequences_.begin(), sequences_.end(), s);
  if (it == sequences_.end())
    throw std::invalid_argument(std::string("sequence ") + to_string(s) + " is not part of this fault network");
  return static_cast<std::size_t>(it - sequences_.begin()) * nb_ + bus;
}

Eigen::VectorXcd FaultNetwork::solve(const Eigen::VectorXcd& rhs) const { return lu_.solve(rhs); }
Eigen::MatrixXcd FaultNetwork::solve(const Eigen::MatrixXcd& rhs) const { return lu_.solve(rhs); }

NetworkSolution FaultNetwork::unpack(const Eigen::VectorXcd& x) const {
  NetworkSolution sol;
  sol.buses = buses_;
  sol.v.resize(nb_);
  for (std::size_t s = 0; s < sequences_.size(); ++s)
    for (std::size_t b = 0; b < nb_; ++b) sol.v[b][sequences_[s]] = x(static_cast<Eigen::Index>(s * nb_ + b));
  const std::size_t cur = sequences_.size() * nb_;
  if (static_cast<std::size_t>(x.size()) > cur)
    for (std::size_t s = 0; s < sequences_.size(); ++s)
      sol.fault_current[sequences_[s]] = x(static_cast<Eigen::Index>(cur + s));
  return sol;
}

TheveninEquivalent thevenin_at(const NetworkCase& c, const std::string& bus, const FaultSpec& fault, Sequence seq) {
  c.validate();
  FaultNetwork net(c, fault);
  const std::size_t b = net.bus(bus);

  TheveninEquivalent th;
  if (net.has(seq)) {
    const auto u = static_cast<Eigen::Index>(net.unknown(b, seq));
    th.v_th = net.solve(net.source_rhs())(u);
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(net.size()));
    e(u) = 1.0;
    th.z_th = net.solve(e)(u);
  } else {
    // Sequence absent from the faulted network: plain passive network.
    SequenceNetwork sn = assemble_admittance(c, seq, fault);
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(sn.y);
    if (!lu.isInvertible()) throw NetworkError("singular network matrix", suspect_bus(lu, sn.buses, sn.buses.size()));
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(sn.y.rows());
    e(static_cast<Eigen::Index>(b)) = 1.0;
    th.v_th = lu.solve(sn.injection)(static_cast<Eigen::Index>(b));
    th.z_th = lu.solve(e)(static_cast<Eigen::Index>(b));
  }
  if (std::abs(th.z_th) < 1e-14)
    throw NetworkError("zero driving-point impedance at bus '" + bus + "' (bolted fault on the bus)", bus);
  return th;
}

NetworkSolution solve_with_norton(const NetworkCase& c, const FaultSpec& fault, const std::vector<IbrNorton>& nortons) {
  if (nortons.size() != c.ibrs.size())
    throw std::invalid_argument("solve_with_norton needs one Norton equivalent per IBR");
  FaultNetwork net(c, fault);
  Eigen::MatrixXcd a = net.matrix();
  Eigen::VectorXcd b = net.source_rhs();
  for (std::size_t k = 0; k < nortons.size(); ++k) {
    const std::size_t bus = net.bus(c.ibrs[k].bus);
    for (Sequence s : {Sequence::positive, Sequence::negative}) {
      if (!net.has(s)) continue;
      const NortonEquivalent& n = s == Sequence::positive ? nortons[k].pos : nortons[k].neg;
      const auto u = static_cast<Eigen::Index>(net.unknown(bus, s));
      a(u, u) += n.y_n;
      b(u) += n.i_n;
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(a);
  if (!lu.isInvertible()) throw NetworkError("singular network matrix with Norton stamps");
  return net.unpack(lu.solve(b));
}

}  // namespace scfault
