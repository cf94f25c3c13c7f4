#include "scfault/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <thread>

namespace scfault {

namespace {

constexpr double kRootTol = 1e-10;
constexpr double kDedup = 1e-6;
constexpr double kFdStep = 1e-7;
constexpr int kNewtonSteps = 100;

unsigned worker_count(unsigned requested, std::size_t jobs) {
  unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

// Runs body(j) for j in [0, jobs) on a few threads; each j writes only its own
// output slot so the merge order is the index order.
template <typename Body>
void parallel_for(std::size_t jobs, unsigned threads, Body body) {
  const unsigned n = worker_count(threads, jobs);
  if (n <= 1) {
    for (std::size_t j = 0; j < jobs; ++j) body(j);
    return;
  }
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < n; ++t)
    pool.emplace_back([&, t] {
      for (std::size_t j = t; j < jobs; j += n) body(j);
    });
}

// Largest phasor modulus in a residual stored as (re, im) pairs.
double phasor_norm(const Eigen::VectorXd& r) {
  double m = 0.0;
  for (Eigen::Index q = 0; q + 1 < r.size(); q += 2) m = std::max(m, std::hypot(r(q), r(q + 1)));
  return std::isnan(r.sum()) ? std::numeric_limits<double>::infinity() : m;
}

// Damped Newton on a real vector function with central differences.
template <typename F>
bool newton(F&& fun, Eigen::VectorXd& x) {
  Eigen::VectorXd r = fun(x);
  double norm = phasor_norm(r);
  for (int it = 0; it < kNewtonSteps && norm >= kRootTol; ++it) {
    const auto n = x.size();
    Eigen::MatrixXd jac(n, n);
    for (Eigen::Index c = 0; c < n; ++c) {
      Eigen::VectorXd xp = x, xm = x;
      xp(c) += kFdStep;
      xm(c) -= kFdStep;
      jac.col(c) = (fun(xp) - fun(xm)) / (2.0 * kFdStep);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
    if (!lu.isInvertible()) return false;
    const Eigen::VectorXd step = lu.solve(-r);
    double alpha = 1.0;
    bool moved = false;
    while (alpha > 1e-10) {
      const Eigen::VectorXd trial = x + alpha * step;
      const Eigen::VectorXd rt = fun(trial);
      const double nt = phasor_norm(rt);
      if (std::isfinite(nt) && nt < norm) {
        x = trial;
        r = rt;
        norm = nt;
        moved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!moved) break;
  }
  return norm < kRootTol;
}

}  // namespace

std::vector<Phasor> find_roots(const ResidualFunction& g, const GridSpec& grid) {
  if (grid.n_mag < 2 || grid.n_ang < 3 || !(grid.mag_max > grid.mag_min) || !(grid.ang_max > grid.ang_min))
    throw std::invalid_argument("oracle grid is degenerate");
  const bool wraps = grid.ang_max - grid.ang_min >= 360.0;
  const double dr = (grid.mag_max - grid.mag_min) / grid.n_mag;
  const double da = (grid.ang_max - grid.ang_min) / (wraps ? grid.n_ang : grid.n_ang - 1);
  auto point = [&](int i, int j) { return polar(grid.mag_min + (i + 0.5) * dr, grid.ang_min + j * da); };

  const auto nm = static_cast<std::size_t>(grid.n_mag);
  const auto na = static_cast<std::size_t>(grid.n_ang);
  std::vector<double> value(nm * na);
  parallel_for(nm, grid.threads, [&](std::size_t i) {
    for (std::size_t j = 0; j < na; ++j)
      value[i * na + j] = std::abs(g(point(static_cast<int>(i), static_cast<int>(j))));
  });

  auto at = [&](int i, int j) -> std::optional<double> {
    if (i < 0 || i >= grid.n_mag) return std::nullopt;
    if (wraps) j = (j + grid.n_ang) % grid.n_ang;
    else if (j < 0 || j >= grid.n_ang) return std::nullopt;
    return value[static_cast<std::size_t>(i) * na + static_cast<std::size_t>(j)];
  };

  // Seeds: cells that are minima along at least one grid line through them and
  // close enough to zero that a root could sit inside the neighbourhood. Two
  // roots a cell apart leave a single 2-D minimum but a valley on each.
  std::vector<std::pair<int, int>> minima, basins;
  constexpr int kDirs[4][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};
  for (int i = 0; i < grid.n_mag; ++i)
    for (int j = 0; j < grid.n_ang; ++j) {
      const double here = *at(i, j);
      double spread = 0.0;
      bool line_min = false, all_min = true;
      for (const auto& d : kDirs) {
        const auto lo = at(i - d[0], j - d[1]), hi = at(i + d[0], j + d[1]);
        if (lo) spread = std::max(spread, std::abs(*lo - here));
        if (hi) spread = std::max(spread, std::abs(*hi - here));
        const bool m = (!lo || *lo >= here) && (!hi || *hi >= here);
        line_min = line_min || m;
        all_min = all_min && m;
      }
      if (line_min && here <= 2.0 * spread) minima.emplace_back(i, j);
      if (all_min) basins.emplace_back(i, j);
    }

  auto residual = [&](const Eigen::VectorXd& p) {
    const Phasor r = g({p(0), p(1)});
    Eigen::VectorXd out(2);
    out << r.real(), r.imag();
    return out;
  };

  std::vector<std::optional<Phasor>> polished(minima.size());
  parallel_for(minima.size(), grid.threads, [&](std::size_t m) {
    const Phasor start = point(minima[m].first, minima[m].second);
    Eigen::VectorXd x(2);
    x << start.real(), start.imag();
    if (newton(residual, x) && std::abs(g({x(0), x(1)})) < kRootTol) polished[m] = Phasor{x(0), x(1)};
  });

  std::vector<Phasor> unique;
  auto add = [&](Phasor r) {
    const bool seen = std::any_of(unique.begin(), unique.end(), [&](Phasor u) { return std::abs(u - r) < kDedup; });
    if (!seen) unique.push_back(r);
    return !seen;
  };
  for (const auto& r : polished)
    if (r) add(*r);

  // Roots a fraction of a cell apart share one minimum. A finer local grid
  // over each minimum's neighbourhood separates them.
  constexpr int kSub = 24;
  std::vector<std::vector<Phasor>> local(basins.size());
  parallel_for(basins.size(), grid.threads, [&](std::size_t m) {
    const double r0 = grid.mag_min + (basins[m].first - 1) * dr;
    const double a0 = grid.ang_min + (basins[m].second - 1) * da;
    const double sr = 3.0 * dr / kSub, sa = 2.0 * da / (kSub - 1);
    auto sub = [&](int i, int j) { return polar(std::max(0.0, r0 + (i + 0.5) * sr), a0 + j * sa); };
    std::vector<double> fine(kSub * kSub);
    for (int i = 0; i < kSub; ++i)
      for (int j = 0; j < kSub; ++j) fine[i * kSub + j] = std::abs(g(sub(i, j)));
    for (int i = 0; i < kSub; ++i)
      for (int j = 0; j < kSub; ++j) {
        bool is_min = true;
        for (int di = -1; di <= 1 && is_min; ++di)
          for (int dj = -1; dj <= 1; ++dj) {
            const int ii = i + di, jj = j + dj;
            if ((!di && !dj) || ii < 0 || ii >= kSub || jj < 0 || jj >= kSub) continue;
            if (fine[ii * kSub + jj] < fine[i * kSub + j]) {
              is_min = false;
              break;
            }
          }
        if (!is_min) continue;
        const Phasor start = sub(i, j);
        Eigen::VectorXd x(2);
        x << start.real(), start.imag();
        if (newton(residual, x) && std::abs(g({x(0), x(1)})) < kRootTol) local[m].emplace_back(x(0), x(1));
      }
  });
  for (const auto& roots : local)
    for (Phasor r : roots) add(r);

  std::erase_if(unique, [&](Phasor r) { return std::abs(r) < grid.mag_min || std::abs(r) > grid.mag_max; });
  std::sort(unique.begin(), unique.end(), [](Phasor a, Phasor b) {
    if (std::abs(a) != std::abs(b)) return std::abs(a) < std::abs(b);
    return angle_deg(a) < angle_deg(b);
  });
  return unique;
}

MultistartResult find_roots_multistart(const FaultProblem& problem, const MultistartSpec& spec) {
  if (spec.starts < 1) throw std::invalid_argument("multistart needs at least one start");
  const auto np = static_cast<Eigen::Index>(problem.port_count());
  const std::size_t n = problem.ibr_count();
  MultistartResult result;
  result.total_starts = spec.starts;
  if (np == 0) return result;

  // Starts drawn up front from one seeded stream keep the run deterministic.
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> mag(spec.mag_min, spec.mag_max);
  std::uniform_real_distribution<double> small(0.0, 0.5);
  std::uniform_real_distribution<double> ang(-180.0, 180.0);
  std::vector<Eigen::VectorXcd> starts;
  for (int s = 0; s < spec.starts; ++s) {
    Eigen::VectorXcd v(np);
    for (Eigen::Index q = 0; q < np; ++q) {
      const double m = static_cast<std::size_t>(q) < n ? mag(rng) : small(rng);
      v(q) = polar(m, ang(rng));
    }
    starts.push_back(v);
  }

  auto fun = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXcd v(np);
    for (Eigen::Index q = 0; q < np; ++q) v(q) = {x(2 * q), x(2 * q + 1)};
    const Eigen::VectorXcd r = problem.mismatch(v, problem.currents(v));
    Eigen::VectorXd out(2 * np);
    for (Eigen::Index q = 0; q < np; ++q) {
      out(2 * q) = r(q).real();
      out(2 * q + 1) = r(q).imag();
    }
    return out;
  };

  std::vector<std::optional<Eigen::VectorXcd>> found(starts.size());
  parallel_for(starts.size(), spec.threads, [&](std::size_t s) {
    Eigen::VectorXd x(2 * np);
    for (Eigen::Index q = 0; q < np; ++q) {
      x(2 * q) = starts[s](q).real();
      x(2 * q + 1) = starts[s](q).imag();
    }
    if (!newton(fun, x)) return;
    Eigen::VectorXcd v(np);
    for (Eigen::Index q = 0; q < np; ++q) v(q) = {x(2 * q), x(2 * q + 1)};
    found[s] = v;
  });

  for (const auto& f : found) {
    if (!f) continue;
    ++result.converged_starts;
    const bool seen = std::any_of(result.roots.begin(), result.roots.end(), [&](const Eigen::VectorXcd& r) {
      return (r - *f).cwiseAbs().maxCoeff() < kDedup;
    });
    if (!seen) result.roots.push_back(*f);
  }
  std::sort(result.roots.begin(), result.roots.end(), [](const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
    for (Eigen::Index q = 0; q < a.size(); ++q)
      if (std::abs(a(q)) != std::abs(b(q))) return std::abs(a(q)) < std::abs(b(q));
    return false;
  });
  return result;
}

std::vector<std::vector<Phasor>> oracle_roots(const FaultProblem& problem) {
  std::vector<std::vector<Phasor>> out;
  if (problem.ibr_count() == 1 && !problem.has_negative()) {
    for (const Phasor& r : find_roots(ResidualFunction(problem, 0))) out.push_back({r});
    return out;
  }
  for (const auto& r : find_roots_multistart(problem).roots) {
    std::vector<Phasor> v;
    for (std::size_t k = 0; k < problem.ibr_count(); ++k) v.push_back(r(static_cast<Eigen::Index>(k)));
    out.push_back(v);
  }
  return out;
}

Certificate certify(const IterationTrace& trace, const std::vector<std::vector<Phasor>>& roots) {
  Certificate c;
  if (!trace.converged()) {
    c.message = "trace did not converge";
    return c;
  }
  if (roots.empty()) {
    c.contradiction = true;
    c.message = "solver converged but the oracle found no root; needs manual review";
    return c;
  }
  const std::vector<Phasor> v = trace.final_voltages();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < roots.size(); ++r) {
    if (roots[r].size() != v.size()) throw std::invalid_argument("oracle root has the wrong number of IBRs");
    double d = 0.0;
    for (std::size_t b = 0; b < v.size(); ++b) d = std::max(d, std::abs(v[b] - roots[r][b]));
    if (d < best) {
      best = d;
      c.root = r;
    }
  }
  for (std::size_t b = 0; b < v.size(); ++b) {
    const Phasor root = roots[c.root][b];
    c.mag_error = std::max(c.mag_error, std::abs(std::abs(v[b]) - std::abs(root)) / std::abs(root));
    c.angle_error = std::max(c.angle_error, std::abs(normalize_deg(angle_deg(v[b]) - angle_deg(root))));
  }
  c.pass = c.mag_error <= 2.0 * trace.tol && c.angle_error <= 2.0;
  c.message = c.pass ? "within bounds of oracle root" : "outside bounds of nearest oracle root";
  return c;
}

}  // namespace scfault
