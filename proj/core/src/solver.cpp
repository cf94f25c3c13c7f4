#include "scfault/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace scfault {

namespace {

constexpr int kPrefaultSteps = 3;
// Below this the terminal angle, and with it the model current, is undefined.
constexpr double kCollapsed = 1e-9;
constexpr double kStationary = 1e-12;

double relative_change(Phasor now, Phasor before, StopRule rule) {
  const double denom = std::max(std::abs(before), 1e-300);
  if (rule == StopRule::magnitude) return std::abs(std::abs(now) - std::abs(before)) / denom;
  return std::abs(now - before) / denom;
}

Eigen::VectorXcd expand_starts(const std::vector<Phasor>& given, std::size_t n, const char* what) {
  if (given.size() != 1 && given.size() != n)
    throw std::invalid_argument(std::string(what) + " needs one value or one per IBR (" + std::to_string(n) + ")");
  Eigen::VectorXcd v(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) v(static_cast<Eigen::Index>(k)) = given.size() == 1 ? given[0] : given[k];
  return v;
}

class Recorder {
 public:
  Recorder(const FaultProblem& p, IterationTrace& trace) : p_(p), trace_(trace) {}

  void add(int k, const Eigen::VectorXcd& v, const Eigen::VectorXcd& i, const Eigen::VectorXcd& y,
           const Eigen::VectorXcd& in, const Eigen::VectorXcd& mismatch) {
    Iteration it;
    it.k = k;
    const std::size_t n = p_.ibr_count();
    for (std::size_t b = 0; b < n; ++b) {
      const UnitScaling& s = p_.scaling(b);
      IbrIterate r;
      for (Sequence seq : {Sequence::positive, Sequence::negative}) {
        if (seq == Sequence::negative && !p_.has_negative()) continue;
        const auto q = static_cast<Eigen::Index>(p_.port_of(b, seq));
        r.v[seq] = v(q) * s.voltage;
        r.i[seq] = i(q) / s.current;
        r.y_n[seq] = y(q) / s.admittance();
        r.i_n[seq] = in(q) / s.current;
        r.residual = std::max(r.residual, std::abs(mismatch(q)) / s.current);
      }
      it.ibr.push_back(r);
    }
    trace_.iterations.push_back(std::move(it));
  }

 private:
  const FaultProblem& p_;
  IterationTrace& trace_;
};

IterationTrace new_trace(const FaultProblem& p, const SolverConfig& cfg, Scheme scheme) {
  IterationTrace t;
  t.scheme = scheme;
  t.init = cfg.init;
  t.fault = p.fault().name;
  t.tol = cfg.tol;
  for (std::size_t k = 0; k < p.ibr_count(); ++k) {
    t.ibr_buses.push_back(p.network_case().ibrs[k].bus);
    t.scaling.push_back(p.scaling(k));
  }
  return t;
}

void fail(IterationTrace& t, Status s, std::string reason) {
  t.status = s;
  t.reason = std::move(reason);
}

// Per-port slope admittances on the system base for the tangent scheme.
Eigen::VectorXcd tangent_slopes(const FaultProblem& p, const Eigen::VectorXcd& v) {
  Eigen::VectorXcd y = Eigen::VectorXcd::Zero(v.size());
  for (std::size_t k = 0; k < p.ibr_count(); ++k) {
    const UnitScaling& s = p.scaling(k);
    SequenceSet vu = p.terminal(v, k);
    vu.pos *= s.voltage;
    vu.neg *= s.voltage;
    const auto slope = p.network_case().ibrs[k].model->slope_admittance(vu);
    if (!slope) throw std::logic_error("model has no tabular view");
    y(static_cast<Eigen::Index>(k)) = slope->pos * s.admittance();
    if (p.has_negative()) y(static_cast<Eigen::Index>(p.port_of(k, Sequence::negative))) = slope->neg * s.admittance();
  }
  return y;
}

std::vector<ConditionReport> conditions_at(const FaultProblem& p, const SolverConfig& cfg, const InitialPoint& init) {
  std::vector<ConditionReport> out;
  for (std::size_t b = 0; b < p.ibr_count(); ++b) {
    const auto q = static_cast<Eigen::Index>(b);
    std::optional<Phasor> v1;
    if (init.v1.size() > 0) v1 = init.v1(q);
    out.push_back(check_conditions(cfg.scheme, *p.network_case().ibrs[b].model, init.v0(q), v1, p.thevenin(b),
                                   p.scaling(b)));
  }
  return out;
}

IterationTrace iterate(const FaultProblem& p, const SolverConfig& cfg, Scheme scheme) {
  IterationTrace trace = new_trace(p, cfg, scheme);
  Recorder rec(p, trace);
  const std::size_t n = p.ibr_count();
  int k = 0;
  try {
    cfg.validate();
    if (scheme == Scheme::solver1)
      for (std::size_t b = 0; b < n; ++b)
        if (!p.network_case().ibrs[b].model->slope_admittance(SequenceSet{})) {
          fail(trace, Status::setup_failure,
               "IBR at " + p.network_case().ibrs[b].bus + ": tangent scheme needs a tabular model, got " +
                   p.network_case().ibrs[b].model->kind());
          return trace;
        }

    const InitialPoint init = initialize(p, cfg);
    Eigen::VectorXcd v_prev = init.v0;
    Eigen::VectorXcd f_prev = p.currents(v_prev);
    const Eigen::VectorXcd zeros = Eigen::VectorXcd::Zero(v_prev.size());
    rec.add(0, v_prev, init.i0, zeros, init.i0, p.mismatch(v_prev, f_prev));

    if (n == 0) {
      trace.status = Status::converged;
      return trace;
    }

    // A generated second start equal to v0 means v0 already solves the
    // network; the first iteration then reports convergence.
    if (scheme == Scheme::solver1 || (scheme == Scheme::solver2 && init.v1_explicit)) {
      const auto reports = conditions_at(p, cfg, init);
      for (std::size_t b = 0; b < reports.size(); ++b)
        if (!reports[b].pass) {
          fail(trace, Status::setup_failure, "IBR at " + p.network_case().ibrs[b].bus + ": " + reports[b].reason);
          return trace;
        }
    }

    Eigen::VectorXcd v_prev2;
    Eigen::VectorXcd i_prev;
    for (k = 1; k <= cfg.max_iter; ++k) {
      const Eigen::VectorXcd i = f_prev;
      Eigen::VectorXcd y = zeros;
      if (scheme == Scheme::solver1) {
        y = tangent_slopes(p, v_prev);
      } else if (scheme == Scheme::solver2 && k >= 2) {
        bool moving = false;
        for (Eigen::Index q = 0; q < y.size(); ++q) {
          const Phasor dv = v_prev(q) - v_prev2(q);
          if (std::abs(dv) < kStationary) continue;
          moving = true;
          y(q) = -(i(q) - i_prev(q)) / dv;
        }
        if (!moving) {
          trace.status = Status::converged;
          trace.reason = "iterate stationary to machine precision";
          return trace;
        }
      }
      const Eigen::VectorXcd in = i + y.cwiseProduct(v_prev);

      Eigen::VectorXcd v;
      if (scheme == Scheme::solver2 && k == 1 && init.v1_explicit)
        v = init.v1;
      else
        v = p.solve_ports(in, y);

      const Eigen::VectorXcd f_v = p.currents(v);
      rec.add(k, v, i, y, in, p.mismatch(v, f_v));

      double change = 0.0;
      bool diverged = false, collapsed = false;
      for (std::size_t b = 0; b < n; ++b) {
        const auto q = static_cast<Eigen::Index>(b);
        if (!std::isfinite(std::abs(v(q))) || std::abs(v(q)) > cfg.divergence_limit) diverged = true;
        if (std::abs(v(q)) < kCollapsed) collapsed = true;
        change = std::max(change, relative_change(v(q), v_prev(q), cfg.stop_rule));
      }
      if (diverged) {
        fail(trace, Status::diverged, "terminal voltage above " + std::to_string(cfg.divergence_limit) + " pu");
        return trace;
      }
      if (collapsed) {
        fail(trace, Status::diverged, "terminal voltage collapsed to zero");
        return trace;
      }
      if (change < cfg.tol) {
        trace.status = Status::converged;
        return trace;
      }
      v_prev2 = v_prev;
      v_prev = v;
      i_prev = i;
      f_prev = f_v;
    }
    fail(trace, Status::max_iterations, "iteration limit reached");
  } catch (const NetworkError& e) {
    fail(trace, Status::setup_failure, std::string(e.what()) + " at iteration " + std::to_string(k));
  } catch (const std::exception& e) {
    fail(trace, Status::setup_failure, e.what());
  }
  return trace;
}

}  // namespace

const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::traditional: return "traditional";
    case Scheme::solver1: return "nr";
    case Scheme::solver2: return "secant";
  }
  return "?";
}

const char* to_string(InitKind i) {
  switch (i) {
    case InitKind::zero: return "zero";
    case InitKind::prefault: return "powerflow";
    case InitKind::explicit_values: return "explicit";
  }
  return "?";
}

const char* to_string(StopRule r) { return r == StopRule::phasor ? "phasor" : "magnitude"; }

const char* to_string(Status s) {
  switch (s) {
    case Status::converged: return "Converged";
    case Status::max_iterations: return "MaxIterations";
    case Status::setup_failure: return "SetupFailure";
    case Status::diverged: return "Diverged";
  }
  return "?";
}

void SolverConfig::validate() const {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be > 0");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
  if (!(divergence_limit > 0.0)) throw std::invalid_argument("divergence limit must be > 0");
  if (init == InitKind::explicit_values && v0.empty()) throw std::invalid_argument("explicit init needs v0 values");
}

std::vector<Phasor> IterationTrace::final_voltages() const {
  std::vector<Phasor> out;
  if (iterations.empty()) return out;
  for (std::size_t b = 0; b < last().ibr.size(); ++b) out.push_back(last().ibr[b].v.pos / scaling[b].voltage);
  return out;
}

InitialPoint initialize(const FaultProblem& p, const SolverConfig& cfg) {
  const std::size_t n = p.ibr_count();
  const auto np = static_cast<Eigen::Index>(p.port_count());
  InitialPoint init;
  init.v0 = p.open_voltage();
  init.i0 = Eigen::VectorXcd::Zero(np);

  if (cfg.init == InitKind::prefault && n > 0) {
    FaultProblem pre(p.network_case(), FaultSpec::none());
    Eigen::VectorXcd v = pre.open_voltage();
    Eigen::VectorXcd i = Eigen::VectorXcd::Zero(v.size());
    const Eigen::VectorXcd y = Eigen::VectorXcd::Zero(v.size());
    for (int step = 0; step < kPrefaultSteps; ++step) {
      for (std::size_t b = 0; b < n; ++b) {
        const auto q = static_cast<Eigen::Index>(b);
        const Phasor dir = std::abs(v(q)) > 0.0 ? v(q) / std::abs(v(q)) : Phasor{1.0, 0.0};
        i(q) = p.network_case().ibrs[b].model->prefault_active_current() * p.scaling(b).current * dir;
      }
      v = pre.solve_ports(i, y);
    }
    // No negative sequence before the fault.
    init.v0 = Eigen::VectorXcd::Zero(np);
    init.v0.head(static_cast<Eigen::Index>(n)) = v;
    init.i0.head(static_cast<Eigen::Index>(n)) = i;
  } else if (cfg.init == InitKind::explicit_values) {
    init.v0.head(static_cast<Eigen::Index>(n)) = expand_starts(cfg.v0, n, "v0");
  }

  if (cfg.scheme == Scheme::solver2 && n > 0) {
    if (!cfg.v1.empty()) {
      init.v1 = init.v0;
      init.v1.head(static_cast<Eigen::Index>(n)) = expand_starts(cfg.v1, n, "v1");
      init.v1_explicit = true;
    } else {
      init.v1 = p.solve_ports(p.currents(init.v0), Eigen::VectorXcd::Zero(np));
    }
  }
  return init;
}

IterationTrace run_traditional(const FaultProblem& p, const SolverConfig& cfg) { return iterate(p, cfg, Scheme::traditional); }
IterationTrace run_solver1(const FaultProblem& p, const SolverConfig& cfg) { return iterate(p, cfg, Scheme::solver1); }
IterationTrace run_solver2(const FaultProblem& p, const SolverConfig& cfg) { return iterate(p, cfg, Scheme::solver2); }

IterationTrace run(const FaultProblem& p, const SolverConfig& cfg) { return iterate(p, cfg, cfg.scheme); }

IterationTrace run(const NetworkCase& c, const FaultSpec& fault, const SolverConfig& cfg) {
  try {
    FaultProblem p(c, fault);
    return run(p, cfg);
  } catch (const std::exception& e) {
    IterationTrace t;
    t.scheme = cfg.scheme;
    t.init = cfg.init;
    t.fault = fault.name;
    t.tol = cfg.tol;
    fail(t, Status::setup_failure, e.what());
    return t;
  }
}

ResidualFunction::ResidualFunction(IbrModelPtr model, TheveninEquivalent th, UnitScaling scaling)
    : model_(std::move(model)), th_(th), scaling_(scaling) {
  if (!model_) throw std::invalid_argument("residual function needs a model");
  if (th_.z_th == Impedance{}) throw std::invalid_argument("residual function needs a nonzero z_th");
}

ResidualFunction::ResidualFunction(const FaultProblem& p, std::size_t ibr)
    : ResidualFunction(p.network_case().ibrs.at(ibr).model, p.thevenin(ibr), p.scaling(ibr)) {
  if (p.ibr_count() != 1 || p.has_negative())
    throw std::invalid_argument("single-terminal residual needs one IBR and a balanced fault");
}

Phasor ResidualFunction::f(Phasor v) const {
  SequenceSet vu;
  vu.pos = v * scaling_.voltage;
  return model_->evaluate(vu).pos * scaling_.current;
}

Phasor ResidualFunction::operator()(Phasor v) const { return f(v) - (v - th_.v_th) / th_.z_th; }

ConditionReport check_conditions(Scheme scheme, const IbrModel& model, Phasor v0, std::optional<Phasor> v1,
                                 const TheveninEquivalent& th, const UnitScaling& scaling) {
  if (th.z_th == Impedance{}) return {false, "Thevenin impedance is zero"};
  switch (scheme) {
    case Scheme::traditional: return {true, "no start-point condition for the fixed-point scheme"};
    case Scheme::solver1: {
      SequenceSet vu;
      vu.pos = v0 * scaling.voltage;
      const auto slope = model.slope_admittance(vu);
      if (!slope) return {false, "model has no tabular view"};
      const Admittance fprime = -slope->pos * scaling.admittance();
      const Admittance network = 1.0 / th.z_th;
      if (std::abs(fprime - network) <= 1e-9 * std::max(std::abs(fprime), std::abs(network)))
        return {false, "tabular slope on the segment of |v0| equals 1/z_th, so g'(v0) = 0"};
      return {true, "tabular slope differs from 1/z_th at v0"};
    }
    case Scheme::solver2: {
      if (!v1) return {false, "secant scheme needs a second start"};
      if (std::abs(*v1 - v0) <= kStationary * std::max(1.0, std::abs(v0))) return {false, "v1 equals v0"};
      auto shared = std::shared_ptr<const IbrModel>(&model, [](const IbrModel*) {});
      const ResidualFunction g(shared, th, scaling);
      const Phasor g0 = g(v0);
      const Phasor g1 = g(*v1);
      if (std::abs(g1 - g0) <= kStationary * std::max(std::abs(g0) + std::abs(g1), 1e-300))
        return {false, "g(v0) equals g(v1), so the secant slope vanishes"};
      return {true, "v1 distinct from v0 and g(v1) != g(v0)"};
    }
  }
  return {false, "unknown scheme"};
}

std::vector<ConditionReport> check_initial_conditions(const FaultProblem& p, const SolverConfig& cfg) {
  return conditions_at(p, cfg, initialize(p, cfg));
}

std::optional<double> estimate_order(const IterationTrace& trace, const std::vector<Phasor>& v_star) {
  if (!trace.converged()) throw std::invalid_argument("convergence order needs a converged trace");
  if (trace.iterations.empty()) return std::nullopt;
  const std::size_t n = trace.ibr_buses.size();
  if (v_star.size() != n) throw std::invalid_argument("v_star needs one value per IBR");

  std::vector<double> e;
  double scale = 1.0;
  for (const Phasor& s : v_star) scale = std::max(scale, std::abs(s));
  for (const Iteration& it : trace.iterations) {
    double err = 0.0;
    for (std::size_t b = 0; b < n; ++b) err = std::max(err, std::abs(it.ibr[b].v.pos / trace.scaling[b].voltage - v_star[b]));
    e.push_back(err);
  }

  // Tail of strictly decreasing errors above the rounding floor.
  const double floor = 1e-12 * scale;
  std::size_t end = e.size();
  while (end > 0 && !(e[end - 1] > floor)) --end;
  if (end == 0) return std::nullopt;
  std::size_t start = end - 1;
  while (start > 0 && e[start - 1] > e[start]) --start;

  std::vector<double> x, y;
  for (std::size_t k = start; k + 1 < end; ++k) {
    x.push_back(std::log(e[k]));
    y.push_back(std::log(e[k + 1]));
  }
  if (x.size() < 3) return std::nullopt;

  const double m = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
    sxx += x[k] * x[k];
    sxy += x[k] * y[k];
  }
  const double den = m * sxx - sx * sx;
  if (den == 0.0) return std::nullopt;
  return (m * sxy - sx * sy) / den;
}

}  // namespace scfault
