#include "qmuse/qcsim.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qmuse::qc {

namespace {

constexpr double kInvSqrt2 = std::numbers::sqrt2 / 2.0;

void check_qubit_count(std::size_t n) {
  if (n < 1 || n > StateVector::kMaxQubits) {
    throw std::invalid_argument("qubit count must be between 1 and 10");
  }
}

}  // namespace

Mat4 mat4_identity() {
  Mat4 m{};
  for (int i = 0; i < 4; ++i) m[i][i] = 1.0;
  return m;
}

Mat4 mat4_mul(const Mat4& a, const Mat4& b) {
  Mat4 out{};
  for (int i = 0; i < 4; ++i) {
    for (int k = 0; k < 4; ++k) {
      const double aik = a[i][k];
      if (aik == 0.0) continue;
      for (int j = 0; j < 4; ++j) out[i][j] += aik * b[k][j];
    }
  }
  return out;
}

Mat4 mat4_transpose(const Mat4& m) {
  Mat4 out{};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) out[i][j] = m[j][i];
  }
  return out;
}

double orthogonality_defect(const Mat4& m) {
  const Mat4 gram = mat4_mul(mat4_transpose(m), m);
  double defect = 0.0;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const double target = (i == j) ? 1.0 : 0.0;
      defect = std::max(defect, std::abs(gram[i][j] - target));
    }
  }
  return defect;
}

int MeasurementRecord::c(std::size_t subscript) const {
  if (subscript >= bits.size()) {
    throw std::out_of_range("measurement bit subscript out of range");
  }
  return bits[bits.size() - 1 - subscript];
}

std::size_t MeasurementRecord::basis_index() const {
  std::size_t index = 0;
  for (int bit : bits) index = (index << 1) | static_cast<std::size_t>(bit & 1);
  return index;
}

GivensRotation::GivensRotation(int i, int j, double angle)
    : i(i), j(j), angle(angle) {
  if (i < 0 || j <= i || j >= 4) {
    throw std::invalid_argument("Givens plane indices must satisfy 0 <= i < j <= 3");
  }
}

Mat4 GivensRotation::matrix() const {
  Mat4 m = mat4_identity();
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  m[i][i] = c;
  m[i][j] = -s;
  m[j][i] = s;
  m[j][j] = c;
  return m;
}

Mat4 compose_givens(const std::array<double, 6>& angles) {
  Mat4 product = mat4_identity();
  for (std::size_t k = 0; k < angles.size(); ++k) {
    const auto [i, j] = kGivensPlanes[k];
    product = mat4_mul(product, GivensRotation(i, j, angles[k]).matrix());
  }
  return product;
}

StateVector::StateVector(std::size_t n_qubits) : n_qubits_(n_qubits) {
  check_qubit_count(n_qubits);
  amps_.assign(std::size_t{1} << n_qubits, Complex{0.0, 0.0});
  amps_[0] = Complex{1.0, 0.0};
}

StateVector::StateVector(std::size_t n_qubits, const std::vector<int>& basis_bits)
    : n_qubits_(n_qubits) {
  check_qubit_count(n_qubits);
  if (basis_bits.size() != n_qubits) {
    throw std::invalid_argument("basis bit count must equal qubit count");
  }
  std::size_t index = 0;
  for (int bit : basis_bits) {
    if (bit != 0 && bit != 1) throw std::invalid_argument("basis bits must be 0 or 1");
    index = (index << 1) | static_cast<std::size_t>(bit);
  }
  amps_.assign(std::size_t{1} << n_qubits, Complex{0.0, 0.0});
  amps_[index] = Complex{1.0, 0.0};
}

double StateVector::norm() const {
  double sum = 0.0;
  for (const Complex& a : amps_) sum += std::norm(a);
  return std::sqrt(sum);
}

void StateVector::apply_hadamard(std::size_t qubit) {
  if (qubit >= n_qubits_) throw std::out_of_range("qubit index out of range");
  const std::size_t stride = std::size_t{1} << qubit;
  for (std::size_t base = 0; base < amps_.size(); base += 2 * stride) {
    for (std::size_t offset = 0; offset < stride; ++offset) {
      const std::size_t lo = base + offset;
      const std::size_t hi = lo + stride;
      const Complex a = amps_[lo];
      const Complex b = amps_[hi];
      amps_[lo] = kInvSqrt2 * (a + b);
      amps_[hi] = kInvSqrt2 * (a - b);
    }
  }
}

void StateVector::apply_hadamard_all() {
  for (std::size_t q = 0; q < n_qubits_; ++q) apply_hadamard(q);
}

void StateVector::apply_ry(std::size_t qubit, double theta) {
  if (qubit >= n_qubits_) throw std::out_of_range("qubit index out of range");
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  const std::size_t stride = std::size_t{1} << qubit;
  for (std::size_t base = 0; base < amps_.size(); base += 2 * stride) {
    for (std::size_t offset = 0; offset < stride; ++offset) {
      const std::size_t lo = base + offset;
      const std::size_t hi = lo + stride;
      const Complex a = amps_[lo];
      const Complex b = amps_[hi];
      amps_[lo] = c * a - s * b;
      amps_[hi] = s * a + c * b;
    }
  }
}

void StateVector::apply_transition_gate(const Mat4& gate) {
  if (n_qubits_ != 2) {
    throw std::invalid_argument("transition gates act on a 2-qubit register");
  }
  if (orthogonality_defect(gate) > 1e-9) {
    throw std::invalid_argument("transition gate is not orthogonal");
  }
  std::array<Complex, 4> out{};
  for (int i = 0; i < 4; ++i) {
    Complex acc{0.0, 0.0};
    for (int j = 0; j < 4; ++j) acc += gate[i][j] * amps_[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = acc;
  }
  for (int i = 0; i < 4; ++i) amps_[static_cast<std::size_t>(i)] = out[static_cast<std::size_t>(i)];
}

std::vector<double> StateVector::probabilities() const {
  std::vector<double> probs(amps_.size());
  for (std::size_t i = 0; i < amps_.size(); ++i) probs[i] = std::norm(amps_[i]);
  return probs;
}

MeasurementRecord StateVector::measure_all(Rng& rng) const {
  if (std::abs(norm() - 1.0) > 1e-6) {
    throw std::logic_error("statevector norm drifted away from 1");
  }
  const double u = rng.uniform01();
  double cumulative = 0.0;
  std::size_t sampled = amps_.size() - 1;
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    cumulative += std::norm(amps_[i]);
    if (u < cumulative) {
      sampled = i;
      break;
    }
  }
  MeasurementRecord record;
  record.bits.resize(n_qubits_);
  for (std::size_t k = 0; k < n_qubits_; ++k) {
    record.bits[k] = static_cast<int>((sampled >> (n_qubits_ - 1 - k)) & 1u);
  }
  return record;
}

}  // namespace qmuse::qc
