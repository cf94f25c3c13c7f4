#include "scfault/ibr_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace scfault {

VccsTable::VccsTable(std::vector<VccsRow> rows) : rows_(std::move(rows)) {
  if (rows_.size() < 2) throw std::invalid_argument("VCCS table needs at least 2 rows");
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    const auto& row = rows_[r];
    if (!std::isfinite(row.v) || !std::isfinite(row.i) || !std::isfinite(row.rel_angle))
      throw std::invalid_argument("VCCS table row " + std::to_string(r + 1) + " has a non-finite entry");
    if (row.v < 0.0) throw std::invalid_argument("VCCS table row " + std::to_string(r + 1) + ": negative voltage");
    if (row.i < 0.0) throw std::invalid_argument("VCCS table row " + std::to_string(r + 1) + ": negative current");
    if (r > 0 && !(row.v < rows_[r - 1].v))
      throw std::invalid_argument("VCCS table voltages must strictly decrease (row " + std::to_string(r + 1) + ")");
  }
}

std::optional<std::size_t> VccsTable::segment(double vmag) const {
  if (vmag > v_max() || vmag <= v_min()) return std::nullopt;
  // First row strictly below vmag closes the segment from below; an exact row
  // voltage therefore lands in the segment underneath it.
  for (std::size_t r = 1; r < rows_.size(); ++r)
    if (rows_[r].v < vmag) return r - 1;
  return std::nullopt;
}

VccsRow VccsTable::at(double vmag) const {
  if (vmag >= v_max()) return {vmag, rows_.front().i, rows_.front().rel_angle};
  if (vmag <= v_min()) return {vmag, rows_.back().i, rows_.back().rel_angle};
  const std::size_t r = *segment(vmag);
  const VccsRow& hi = rows_[r];
  const VccsRow& lo = rows_[r + 1];
  const double t = (vmag - lo.v) / (hi.v - lo.v);
  return {vmag, lo.i + t * (hi.i - lo.i), lo.rel_angle + t * (hi.rel_angle - lo.rel_angle)};
}

Phasor vccs_current(const VccsTable& table, Phasor v) {
  const VccsRow r = table.at(std::abs(v));
  return polar(r.i, angle_deg(v) + r.rel_angle);
}

Admittance vccs_slope_admittance(const VccsTable& table, Phasor v_prev) {
  const auto seg = table.segment(std::abs(v_prev));
  if (!seg) return {};
  const VccsRow& m = table.rows()[*seg + 1];
  const VccsRow& n = table.rows()[*seg];
  const double theta = angle_deg(v_prev);
  const Phasor i_m = polar(m.i, theta + m.rel_angle);
  const Phasor i_n = polar(n.i, theta + n.rel_angle);
  const Phasor v_m = polar(m.v, theta);
  const Phasor v_n = polar(n.v, theta);
  return -(i_m - i_n) / (v_m - v_n);
}

void KFactorParams::validate() const {
  if (!(k1 >= 0.0) || !(k2 >= 0.0)) throw std::invalid_argument("k-factor gains must be >= 0");
  if (!(i_max > 0.0)) throw std::invalid_argument("k-factor i_max must be > 0");
  if (!(v_ref > 0.0)) throw std::invalid_argument("k-factor v_ref must be > 0");
  if (!(i_active_prefault >= 0.0) || i_active_prefault > i_max)
    throw std::invalid_argument("k-factor i_p0 must lie in [0, i_max]");
}

SequenceSet kfactor_current(const KFactorParams& p, const SequenceSet& v) {
  const double v1 = std::abs(v.pos);
  const double iq = std::min(p.k1 * std::max(0.0, p.v_ref - v1), p.i_max);
  const double avail = std::sqrt(std::max(0.0, (p.i_max - iq) * (p.i_max + iq)));
  const double ip = std::min(p.i_active_prefault, avail);
  // Factored form: exactly zero when the active part uses all that is left.
  const double headroom = std::sqrt(std::max(0.0, (avail - ip) * (avail + ip)));
  const double i2 = std::min(p.k2 * std::abs(v.neg), headroom);

  const Phasor u1 = v1 > 0.0 ? v.pos / v1 : Phasor{1.0, 0.0};
  const double v2 = std::abs(v.neg);
  const Phasor u2 = v2 > 0.0 ? v.neg / v2 : Phasor{1.0, 0.0};

  SequenceSet out;
  out.pos = Phasor{ip, -iq} * u1;
  out.neg = Phasor{0.0, i2} * u2;
  return out;
}

NortonEquivalent make_norton(Phasor i_ibr, Admittance y_n, Phasor v_prev) {
  return {i_ibr + y_n * v_prev, y_n};
}

std::optional<SequenceSet> IbrModel::slope_admittance(const SequenceSet&) const { return std::nullopt; }

SequenceSet VccsModel::evaluate(const SequenceSet& v) const {
  SequenceSet out;
  out.pos = vccs_current(table_, v.pos);
  return out;
}

double VccsModel::prefault_active_current() const {
  const VccsRow& top = table_.rows().front();
  return top.i * std::cos(top.rel_angle * std::numbers::pi / 180.0);
}

std::optional<SequenceSet> VccsModel::slope_admittance(const SequenceSet& v_prev) const {
  SequenceSet y;
  y.pos = vccs_slope_admittance(table_, v_prev.pos);
  return y;
}

KFactorModel::KFactorModel(KFactorParams p) : params_(p) { params_.validate(); }

SequenceSet KFactorModel::evaluate(const SequenceSet& v) const { return kfactor_current(params_, v); }

VccsTable tabulate(const IbrModel& model, const std::vector<double>& voltages) {
  std::vector<VccsRow> rows;
  rows.reserve(voltages.size());
  for (double vm : voltages) {
    SequenceSet v;
    v.pos = {vm, 0.0};
    const Phasor i = model.evaluate(v).pos;
    rows.push_back({vm, std::abs(i), std::abs(i) > 0.0 ? angle_deg(i) : 0.0});
  }
  return VccsTable(std::move(rows));
}

}  // namespace scfault
