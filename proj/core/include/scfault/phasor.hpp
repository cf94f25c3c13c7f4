#pragma once

#include <complex>
#include <stdexcept>

namespace scfault {

// All phasors, impedances and admittances are complex per-unit values.
using Phasor = std::complex<double>;
using Impedance = std::complex<double>;
using Admittance = std::complex<double>;

// Rectangular phasor from magnitude and angle in degrees. Angles on the axes
// (multiples of 90) come out exact.
Phasor polar(double mag, double angle_deg);

double magnitude(Phasor p);

// Angle in degrees, normalized to (-180, 180]. The angle of 0 is 0.
double angle_deg(Phasor p);

// Maps any angle in degrees into (-180, 180].
double normalize_deg(double angle);

// angle(i) - angle(v), normalized. Both operands must be nonzero.
double relative_angle(Phasor i, Phasor v);

struct PerUnitBase {
  double s_mva = 100.0;
  double v_kv = 1.0;

  PerUnitBase() = default;
  PerUnitBase(double s, double v);
};

enum class Quantity { voltage, current, power, impedance, admittance };

// Factor that multiplies a per-unit value on `from` to express it on `to`.
double base_ratio(Quantity kind, const PerUnitBase& from, const PerUnitBase& to);

inline double convert_base(double value, Quantity kind, const PerUnitBase& from,
                           const PerUnitBase& to) {
  return value * base_ratio(kind, from, to);
}

inline Phasor convert_base(Phasor value, Quantity kind, const PerUnitBase& from,
                           const PerUnitBase& to) {
  return value * base_ratio(kind, from, to);
}

enum class Sequence { positive, negative, zero };

const char* to_string(Sequence s);

// One phasor per symmetrical component.
struct SequenceSet {
  Phasor pos{};
  Phasor neg{};
  Phasor zero{};

  Phasor& operator[](Sequence s);
  const Phasor& operator[](Sequence s) const;
};

}  // namespace scfault
