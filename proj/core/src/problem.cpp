#include "scfault/problem.hpp"

namespace scfault {

namespace {

const NetworkCase& validated(const NetworkCase& c) {
  c.validate();
  return c;
}

}  // namespace

FaultProblem::FaultProblem(const NetworkCase& c, const FaultSpec& fault)
    : case_(&validated(c)), fault_(fault), net_(c, fault) {
  const std::size_t n = c.ibrs.size();
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t bus = net_.bus(c.ibrs[k].bus);
    ports_.push_back({k, Sequence::positive, net_.unknown(bus, Sequence::positive)});
    const PerUnitBase& unit = c.ibrs[k].base;
    scaling_.push_back({base_ratio(Quantity::voltage, c.system_base, unit),
                        base_ratio(Quantity::current, unit, c.system_base)});
  }
  if (net_.has(Sequence::negative))
    for (std::size_t k = 0; k < n; ++k)
      ports_.push_back({k, Sequence::negative, net_.unknown(net_.bus(c.ibrs[k].bus), Sequence::negative)});

  const auto np = static_cast<Eigen::Index>(ports_.size());
  const auto nx = static_cast<Eigen::Index>(net_.size());
  x0_ = net_.solve(net_.source_rhs());
  Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(nx, np);
  for (Eigen::Index p = 0; p < np; ++p) e(static_cast<Eigen::Index>(ports_[static_cast<std::size_t>(p)].unknown), p) = 1.0;
  w_ = net_.solve(e);
  v_open_.resize(np);
  zp_.resize(np, np);
  for (Eigen::Index p = 0; p < np; ++p) {
    const auto u = static_cast<Eigen::Index>(ports_[static_cast<std::size_t>(p)].unknown);
    v_open_(p) = x0_(u);
    zp_.row(p) = w_.row(u);
  }

  for (Eigen::Index p = 0; p < np; ++p)
    if (std::abs(zp_(p, p)) < 1e-14) {
      const std::string& bus = c.ibrs[ports_[static_cast<std::size_t>(p)].ibr].bus;
      throw NetworkError("zero driving-point impedance at IBR bus '" + bus + "' (bolted fault on the terminal)", bus);
    }
  if (np > 0) {
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(zp_);
    if (!lu.isInvertible()) throw NetworkError("IBR port impedance matrix is singular");
    zp_inv_ = lu.inverse();
  }
}

std::size_t FaultProblem::port_of(std::size_t ibr, Sequence s) const {
  if (s == Sequence::positive) return ibr;
  if (s == Sequence::negative && has_negative()) return ibr_count() + ibr;
  throw std::invalid_argument(std::string("no ") + to_string(s) + "-sequence port in this fault network");
}

TheveninEquivalent FaultProblem::thevenin(std::size_t ibr) const {
  const auto p = static_cast<Eigen::Index>(port_of(ibr, Sequence::positive));
  return {v_open_(p), zp_(p, p)};
}

Eigen::VectorXcd FaultProblem::solve_ports(const Eigen::VectorXcd& i_n, const Eigen::VectorXcd& y_n) const {
  // (I + Zp diag(y)) v = v_open + Zp i_n
  const auto np = zp_.rows();
  if (np == 0) return {};
  Eigen::MatrixXcd m = zp_ * y_n.asDiagonal();
  const double scale = 1.0 + m.norm();
  m += Eigen::MatrixXcd::Identity(np, np);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  const double smin = svd.singularValues()(np - 1);
  if (!(smin > 1e-12 * scale)) throw NetworkError("Norton-stamped network is singular");
  return m.fullPivLu().solve(v_open_ + zp_ * i_n);
}

NetworkSolution FaultProblem::expand(const Eigen::VectorXcd& injection) const {
  return net_.unpack(x0_ + w_ * injection);
}

Eigen::VectorXcd FaultProblem::currents(const Eigen::VectorXcd& v) const {
  const std::size_t n = ibr_count();
  Eigen::VectorXcd i = Eigen::VectorXcd::Zero(v.size());
  for (std::size_t k = 0; k < n; ++k) {
    const UnitScaling& s = scaling_[k];
    SequenceSet vu = terminal(v, k);
    vu.pos *= s.voltage;
    vu.neg *= s.voltage;
    const SequenceSet iu = case_->ibrs[k].model->evaluate(vu);
    i(static_cast<Eigen::Index>(k)) = iu.pos * s.current;
    if (has_negative()) i(static_cast<Eigen::Index>(n + k)) = iu.neg * s.current;
  }
  return i;
}

Eigen::VectorXcd FaultProblem::mismatch(const Eigen::VectorXcd& v, const Eigen::VectorXcd& i) const {
  return i - zp_inv_ * (v - v_open_);
}

SequenceSet FaultProblem::terminal(const Eigen::VectorXcd& ports, std::size_t ibr) const {
  SequenceSet s;
  s.pos = ports(static_cast<Eigen::Index>(ibr));
  if (has_negative()) s.neg = ports(static_cast<Eigen::Index>(ibr_count() + ibr));
  return s;
}

}  // namespace scfault
