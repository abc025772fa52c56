#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "qmuse/rng.hpp"

namespace qmuse::qc {

using Complex = std::complex<double>;

// Real 4x4 matrix in basis order 00, 01, 10, 11 (first-listed qubit of a
// printed ket is the most significant bit of the basis index).
using Mat4 = std::array<std::array<double, 4>, 4>;

Mat4 mat4_identity();
Mat4 mat4_mul(const Mat4& a, const Mat4& b);
Mat4 mat4_transpose(const Mat4& m);

// max_ij |(M^T M - I)_ij|; zero for an exactly orthogonal matrix.
double orthogonality_defect(const Mat4& m);

// Bits of one measured register, most significant first: the list
// [c_{n-1}, ..., c_0]. c(i) returns the bit with subscript i.
struct MeasurementRecord {
  std::vector<int> bits;

  std::size_t size() const { return bits.size(); }
  int c(std::size_t subscript) const;
  std::size_t basis_index() const;

  bool operator==(const MeasurementRecord&) const = default;
};

// Plane rotation acting on two coordinates of the 4-dimensional
// two-qubit space: rows/cols i and j get [[cos, -sin], [sin, cos]].
struct GivensRotation {
  int i;
  int j;
  double angle;

  GivensRotation(int i, int j, double angle);
  Mat4 matrix() const;
};

// The fixed plane order used to compose a 4x4 special orthogonal matrix
// from six angles: (0,1), (0,2), (0,3), (1,2), (1,3), (2,3).
inline constexpr std::array<std::pair<int, int>, 6> kGivensPlanes{
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

// G01(a1) * G02(a2) * G03(a3) * G12(a4) * G13(a5) * G23(a6).
Mat4 compose_givens(const std::array<double, 6>& angles);

// Dense statevector over 1..10 qubits. Qubit q is bit (1 << q) of the
// basis index, so a printed ket |c_{n-1}>...|c_0> reads MSB to LSB and a
// MeasurementRecord is simply the basis index written out in binary.
class StateVector {
 public:
  static constexpr std::size_t kMaxQubits = 10;

  // |0...0>
  explicit StateVector(std::size_t n_qubits);
  // |basis_bits>, bits listed most significant first.
  StateVector(std::size_t n_qubits, const std::vector<int>& basis_bits);

  std::size_t n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return amps_.size(); }
  const std::vector<Complex>& amplitudes() const { return amps_; }

  double norm() const;

  void apply_hadamard(std::size_t qubit);
  void apply_hadamard_all();
  // [[cos(t/2), -sin(t/2)], [sin(t/2), cos(t/2)]] on the designated qubit.
  void apply_ry(std::size_t qubit, double theta);
  // Two-qubit registers only; the gate must be orthogonal within 1e-9.
  void apply_transition_gate(const Mat4& gate);

  // Squared magnitudes, in basis-index order.
  std::vector<double> probabilities() const;

  // Born-rule sample of all qubits. Collapse is not modeled; callers
  // re-prepare the state for every shot.
  MeasurementRecord measure_all(Rng& rng) const;

 private:
  std::size_t n_qubits_;
  std::vector<Complex> amps_;
};

}  // namespace qmuse::qc
