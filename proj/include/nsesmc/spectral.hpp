#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace nsesmc {

using Complex = std::complex<double>;
using Point = std::array<double, 2>;
using Vec2 = std::array<double, 2>;
using CVec2 = std::array<Complex, 2>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Integer wave vector on the torus.
struct Mode {
  int k1 = 0;
  int k2 = 0;

  constexpr int norm2() const { return k1 * k1 + k2 * k2; }
  double norm() const { return std::sqrt(static_cast<double>(norm2())); }
  constexpr int max_abs() const {
    return (k1 < 0 ? -k1 : k1) > (k2 < 0 ? -k2 : k2) ? (k1 < 0 ? -k1 : k1) : (k2 < 0 ? -k2 : k2);
  }
  constexpr Mode operator-() const { return {-k1, -k2}; }
  friend constexpr bool operator==(Mode, Mode) = default;
};

/// Half-lattice membership: k1+k2 > 0, or k1+k2 = 0 with k1 > 0.
constexpr bool in_upper_half(Mode k) {
  return k.k1 + k.k2 > 0 || (k.k1 + k.k2 == 0 && k.k1 > 0);
}

/// The stored half of a truncated frequency lattice. Only modes in the upper
/// half are enumerated; -k is implied for each of them and never stored.
class FreqLattice {
 public:
  /// Square truncation max(|k1|,|k2|) <= half_width.
  explicit FreqLattice(int half_width);

  /// Arbitrary subset of the upper half lattice (used for toy problems).
  static FreqLattice from_modes(std::vector<Mode> modes);

  int half_width() const noexcept { return half_width_; }
  std::size_t size() const noexcept { return modes_.size(); }
  std::span<const Mode> modes() const noexcept { return modes_; }
  const Mode& operator[](std::size_t i) const { return modes_[i]; }

  /// Index of an upper-half mode, or nullopt when k is absent or not upper-half.
  std::optional<std::size_t> index_of(Mode k) const;
  bool contains(Mode k) const { return index_of(k).has_value(); }

  /// True when the lattice is the full square truncation of its half-width.
  bool is_square() const noexcept { return square_; }

  friend bool operator==(const FreqLattice& a, const FreqLattice& b) {
    return a.half_width_ == b.half_width_ && a.modes_ == b.modes_;
  }

 private:
  FreqLattice(int half_width, std::vector<Mode> modes, bool square);

  int half_width_ = 0;
  bool square_ = false;
  std::vector<Mode> modes_;
  std::vector<int> lookup_;  // dense (2H+1)^2 table, -1 where absent
};

using LatticePtr = std::shared_ptr<const FreqLattice>;

LatticePtr make_lattice(int half_width);
LatticePtr make_lattice(std::vector<Mode> modes);

/// Coefficients u_k = <u, psi_k> for k in the stored half lattice. The mirror
/// coefficients u_{-k} = -conj(u_k) are derived on demand.
class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(LatticePtr lattice);
  SpectralField(LatticePtr lattice, std::vector<Complex> coeffs);

  const LatticePtr& lattice_ptr() const noexcept { return lattice_; }
  const FreqLattice& lattice() const noexcept { return *lattice_; }
  std::size_t size() const noexcept { return coeffs_.size(); }
  bool empty() const noexcept { return coeffs_.empty(); }

  std::span<Complex> coeffs() noexcept { return coeffs_; }
  std::span<const Complex> coeffs() const noexcept { return coeffs_; }
  Complex& operator[](std::size_t i) { return coeffs_[i]; }
  const Complex& operator[](std::size_t i) const { return coeffs_[i]; }

  /// Coefficient of any nonzero k: stored value, derived mirror, or zero when
  /// outside the truncation.
  Complex at(Mode k) const;

  bool same_lattice(const SpectralField& other) const;

  /// Sum of |u_k|^2 over the full mirrored lattice (the squared L2 norm).
  double energy() const;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double c);

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double c, SpectralField a) { return a *= c; }

 private:
  LatticePtr lattice_;
  std::vector<Complex> coeffs_;
};

/// Uniform grid on [0, 2pi)^2; values[i1 * size + i2] is the node
/// x = (2pi i1 / size, 2pi i2 / size).
struct PhysicalGrid {
  int size = 0;
  std::vector<Vec2> values;

  static Point node(int size, int i1, int i2) {
    return {kTwoPi * i1 / size, kTwoPi * i2 / size};
  }
};

struct ScalarGrid {
  int size = 0;
  std::vector<double> values;
};

/// Smallest admissible transform size for a half-width: even and >= 2H+2.
constexpr int min_grid_size(int half_width) { return 2 * half_width + 2; }

/// psi_k(x) = k_perp exp(i k.x) / (2 pi |k|), k_perp = (-k2, k1).
CVec2 basis_eval(Mode k, Point x);

PhysicalGrid to_physical(const SpectralField& field, int size);
SpectralField from_physical(const PhysicalGrid& grid, LatticePtr lattice);

/// Multiplies u_k by |k|^{2s}.
SpectralField apply_stokes_power(const SpectralField& field, double s);

/// Vorticity -(d1 u2 - d2 u1) on a uniform grid; clockwise rotation is positive.
ScalarGrid vorticity(const SpectralField& field, int size);

/// Vector coefficients in the plain exponential basis, w(x) = sum_k w_k e^{ik.x},
/// over the full square (2H+1)^2 lattice including k = 0.
class VectorSpectrum {
 public:
  explicit VectorSpectrum(int half_width);

  int half_width() const noexcept { return half_width_; }
  CVec2& operator()(Mode k) { return data_[offset(k)]; }
  const CVec2& operator()(Mode k) const { return data_[offset(k)]; }

 private:
  std::size_t offset(Mode k) const;

  int half_width_;
  std::vector<CVec2> data_;
};

VectorSpectrum to_vector_spectrum(const SpectralField& field);

/// Keeps the k_perp component of each mode. The k = 0 entry is dropped.
/// Input must be Hermitian (coefficient at -k equal to conj of that at k).
SpectralField leray_project(const VectorSpectrum& spectrum, LatticePtr lattice);

}  // namespace nsesmc
