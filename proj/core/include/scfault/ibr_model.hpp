#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "scfault/phasor.hpp"

namespace scfault {

struct VccsRow {
  double v = 0.0;          // terminal voltage magnitude, pu
  double i = 0.0;          // current magnitude, pu
  double rel_angle = 0.0;  // angle(I) - angle(V), degrees
};

// Piecewise-linear |V| -> (|I|, relative angle) table at the unit's base.
// Rows run from the highest voltage down.
class VccsTable {
 public:
  explicit VccsTable(std::vector<VccsRow> rows);

  const std::vector<VccsRow>& rows() const { return rows_; }
  double v_max() const { return rows_.front().v; }
  double v_min() const { return rows_.back().v; }

  // Index r of the segment (rows_[r], rows_[r + 1]) with
  // rows_[r + 1].v < vmag <= rows_[r].v, or nullopt outside the table.
  std::optional<std::size_t> segment(double vmag) const;

  // Interpolated magnitude and relative angle, clamped to the end rows.
  VccsRow at(double vmag) const;

 private:
  std::vector<VccsRow> rows_;
};

Phasor vccs_current(const VccsTable& table, Phasor v);

// Chord admittance of the segment holding |v_prev|, rows rendered on the ray
// of v_prev. Zero outside the table.
Admittance vccs_slope_admittance(const VccsTable& table, Phasor v_prev);

struct KFactorParams {
  double k1 = 3.0;
  double k2 = 3.0;
  double v_ref = 1.0;
  double i_max = 1.2;
  double i_active_prefault = 0.9;

  void validate() const;
};

// Positive- and negative-sequence current with reactive priority. All values
// on the unit's own base.
SequenceSet kfactor_current(const KFactorParams& p, const SequenceSet& v);

struct NortonEquivalent {
  Phasor i_n{};
  Admittance y_n{};
};

NortonEquivalent make_norton(Phasor i_ibr, Admittance y_n, Phasor v_prev);

// f in I = f(V), evaluated on the unit base. Implementations must be
// rotationally covariant per sequence.
class IbrModel {
 public:
  virtual ~IbrModel() = default;

  virtual std::string kind() const = 0;
  virtual SequenceSet evaluate(const SequenceSet& v) const = 0;

  // In-phase current injected before the fault, unit base.
  virtual double prefault_active_current() const = 0;

  // Norton slope admittance for the tangent scheme, or nullopt when the model
  // has no tabular view. Negative-sequence entry in .neg.
  virtual std::optional<SequenceSet> slope_admittance(const SequenceSet& v_prev) const;
};

class VccsModel : public IbrModel {
 public:
  explicit VccsModel(VccsTable table) : table_(std::move(table)) {}

  std::string kind() const override { return "tabular"; }
  SequenceSet evaluate(const SequenceSet& v) const override;
  double prefault_active_current() const override;
  std::optional<SequenceSet> slope_admittance(const SequenceSet& v_prev) const override;

  const VccsTable& table() const { return table_; }

 private:
  VccsTable table_;
};

class KFactorModel : public IbrModel {
 public:
  explicit KFactorModel(KFactorParams p);

  std::string kind() const override { return "kfactor"; }
  SequenceSet evaluate(const SequenceSet& v) const override;
  double prefault_active_current() const override { return params_.i_active_prefault; }

  const KFactorParams& params() const { return params_; }

 private:
  KFactorParams params_;
};

// Samples the positive-sequence response of any model at the given voltage
// magnitudes (descending) into a table.
VccsTable tabulate(const IbrModel& model, const std::vector<double>& voltages);

using IbrModelPtr = std::shared_ptr<const IbrModel>;

}  // namespace scfault
