#include "scfault/phasor.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace scfault {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

}  // namespace

double normalize_deg(double angle) {
  if (!std::isfinite(angle)) throw std::invalid_argument("angle is not finite");
  double a = std::fmod(angle, 360.0);
  if (a <= -180.0) a += 360.0;
  if (a > 180.0) a -= 360.0;
  return a;
}

Phasor polar(double mag, double angle) {
  if (!(mag >= 0.0)) throw std::invalid_argument("phasor magnitude must be >= 0, got " + std::to_string(mag));
  const double a = normalize_deg(angle);
  if (a == 0.0) return {mag, 0.0};
  if (a == 90.0) return {0.0, mag};
  if (a == 180.0) return {-mag, 0.0};
  if (a == -90.0) return {0.0, -mag};
  const double rad = a * kDegToRad;
  return {mag * std::cos(rad), mag * std::sin(rad)};
}

double magnitude(Phasor p) { return std::abs(p); }

double angle_deg(Phasor p) {
  if (p == Phasor{}) return 0.0;
  double a = std::arg(p) / kDegToRad;
  // arg returns [-pi, pi]; fold -180 onto +180
  if (a <= -180.0) a += 360.0;
  return a;
}

double relative_angle(Phasor i, Phasor v) {
  if (i == Phasor{} || v == Phasor{}) throw std::invalid_argument("relative angle of a zero phasor is undefined");
  return normalize_deg(angle_deg(i) - angle_deg(v));
}

PerUnitBase::PerUnitBase(double s, double v) : s_mva(s), v_kv(v) {
  if (!(s > 0.0) || !(v > 0.0)) throw std::invalid_argument("per-unit base needs positive MVA and kV");
}

double base_ratio(Quantity kind, const PerUnitBase& from, const PerUnitBase& to) {
  if (!(from.s_mva > 0.0 && from.v_kv > 0.0 && to.s_mva > 0.0 && to.v_kv > 0.0))
    throw std::invalid_argument("per-unit base needs positive MVA and kV");
  const double s = from.s_mva / to.s_mva;
  const double v = from.v_kv / to.v_kv;
  switch (kind) {
    case Quantity::voltage: return v;
    case Quantity::power: return s;
    case Quantity::current: return s / v;
    case Quantity::impedance: return v * v / s;
    case Quantity::admittance: return s / (v * v);
  }
  throw std::invalid_argument("unknown quantity kind");
}

const char* to_string(Sequence s) {
  switch (s) {
    case Sequence::positive: return "positive";
    case Sequence::negative: return "negative";
    case Sequence::zero: return "zero";
  }
  return "?";
}

Phasor& SequenceSet::operator[](Sequence s) {
  switch (s) {
    case Sequence::positive: return pos;
    case Sequence::negative: return neg;
    default: return zero;
  }
}

const Phasor& SequenceSet::operator[](Sequence s) const {
  switch (s) {
    case Sequence::positive: return pos;
    case Sequence::negative: return neg;
    default: return zero;
  }
}

}  // namespace scfault
