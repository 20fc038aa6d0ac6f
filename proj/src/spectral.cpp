#include "nsesmc/spectral.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "fft.hpp"

namespace nsesmc {

namespace {

std::vector<Mode> square_modes(int half_width) {
  std::vector<Mode> modes;
  for (int k1 = -half_width; k1 <= half_width; ++k1)
    for (int k2 = -half_width; k2 <= half_width; ++k2)
      if (in_upper_half({k1, k2})) modes.push_back({k1, k2});
  return modes;
}

void check_grid_size(int size, int half_width) {
  if (size % 2 != 0 || size < min_grid_size(half_width))
    throw std::invalid_argument("grid size " + std::to_string(size) + " cannot resolve half-width " +
                                std::to_string(half_width));
}

// Writes the exponential coefficient e at k (and conj(e) at -k where the
// half spectrum stores it).
void place_hermitian(Complex* spec, int n, Mode k, Complex e) {
  using detail::half_offset;
  if (k.k2 > 0) {
    spec[half_offset(n, k.k1, k.k2)] = e;
  } else if (k.k2 < 0) {
    spec[half_offset(n, -k.k1, -k.k2)] = std::conj(e);
  } else {
    spec[half_offset(n, k.k1, 0)] = e;
    spec[half_offset(n, -k.k1, 0)] = std::conj(e);
  }
}

Complex read_hermitian(const Complex* spec, int n, Mode k) {
  using detail::half_offset;
  if (k.k2 >= 0) return spec[half_offset(n, k.k1, k.k2)];
  return std::conj(spec[half_offset(n, -k.k1, -k.k2)]);
}

}  // namespace

FreqLattice::FreqLattice(int half_width) : FreqLattice(half_width, square_modes(half_width), true) {
  if (half_width < 1) throw std::invalid_argument("lattice half-width must be >= 1");
}

FreqLattice::FreqLattice(int half_width, std::vector<Mode> modes, bool square)
    : half_width_(half_width), square_(square), modes_(std::move(modes)) {
  const int side = 2 * half_width_ + 1;
  lookup_.assign(static_cast<std::size_t>(side) * side, -1);
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    const Mode k = modes_[i];
    auto& slot = lookup_[static_cast<std::size_t>(k.k1 + half_width_) * side + (k.k2 + half_width_)];
    if (slot != -1) throw std::invalid_argument("duplicate mode in lattice");
    slot = static_cast<int>(i);
  }
}

FreqLattice FreqLattice::from_modes(std::vector<Mode> modes) {
  if (modes.empty()) throw std::invalid_argument("lattice needs at least one mode");
  int hw = 0;
  for (const Mode k : modes) {
    if (k == Mode{0, 0}) throw std::invalid_argument("k = 0 is not a lattice mode");
    if (!in_upper_half(k))
      throw std::invalid_argument("mode (" + std::to_string(k.k1) + "," + std::to_string(k.k2) +
                                  ") is not in the upper half lattice");
    hw = std::max(hw, k.max_abs());
  }
  const bool square = modes == square_modes(hw);
  return FreqLattice(hw, std::move(modes), square);
}

std::optional<std::size_t> FreqLattice::index_of(Mode k) const {
  if (k.max_abs() > half_width_ || !in_upper_half(k)) return std::nullopt;
  const int side = 2 * half_width_ + 1;
  const int idx = lookup_[static_cast<std::size_t>(k.k1 + half_width_) * side + (k.k2 + half_width_)];
  if (idx < 0) return std::nullopt;
  return static_cast<std::size_t>(idx);
}

LatticePtr make_lattice(int half_width) { return std::make_shared<const FreqLattice>(half_width); }

LatticePtr make_lattice(std::vector<Mode> modes) {
  return std::make_shared<const FreqLattice>(FreqLattice::from_modes(std::move(modes)));
}

SpectralField::SpectralField(LatticePtr lattice)
    : lattice_(std::move(lattice)), coeffs_(lattice_->size(), Complex{}) {}

SpectralField::SpectralField(LatticePtr lattice, std::vector<Complex> coeffs)
    : lattice_(std::move(lattice)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != lattice_->size())
    throw std::invalid_argument("coefficient count does not match lattice");
}

Complex SpectralField::at(Mode k) const {
  if (k == Mode{0, 0}) return {};
  if (in_upper_half(k)) {
    const auto i = lattice_->index_of(k);
    return i ? coeffs_[*i] : Complex{};
  }
  const auto i = lattice_->index_of(-k);
  return i ? -std::conj(coeffs_[*i]) : Complex{};
}

bool SpectralField::same_lattice(const SpectralField& other) const {
  return lattice_ == other.lattice_ || (lattice_ && other.lattice_ && *lattice_ == *other.lattice_);
}

double SpectralField::energy() const {
  double s = 0.0;
  for (const Complex& c : coeffs_) s += std::norm(c);
  return 2.0 * s;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  if (!same_lattice(other)) throw std::invalid_argument("lattice mismatch");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  if (!same_lattice(other)) throw std::invalid_argument("lattice mismatch");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double c) {
  for (Complex& v : coeffs_) v *= c;
  return *this;
}

CVec2 basis_eval(Mode k, Point x) {
  if (k == Mode{0, 0}) throw std::invalid_argument("basis function undefined at k = 0");
  const double phase = k.k1 * x[0] + k.k2 * x[1];
  const Complex e = std::polar(1.0 / (kTwoPi * k.norm()), phase);
  return {static_cast<double>(-k.k2) * e, static_cast<double>(k.k1) * e};
}

PhysicalGrid to_physical(const SpectralField& field, int size) {
  const FreqLattice& lattice = field.lattice();
  check_grid_size(size, lattice.half_width());
  const auto& fft = detail::RealFft2d::get(size);
  auto& scratch = detail::thread_scratch(size);
  Complex* s1 = scratch.spec[0].data();
  Complex* s2 = scratch.spec[1].data();
  scratch.spec[0].zero();
  scratch.spec[1].zero();
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    const Mode k = lattice[i];
    const double scale = 1.0 / (kTwoPi * k.norm());
    place_hermitian(s1, size, k, field[i] * (-k.k2 * scale));
    place_hermitian(s2, size, k, field[i] * (k.k1 * scale));
  }
  double* r1 = scratch.real[0].data();
  double* r2 = scratch.real[1].data();
  fft.inverse(s1, r1);
  fft.inverse(s2, r2);

  PhysicalGrid grid;
  grid.size = size;
  grid.values.resize(fft.real_size());
  for (std::size_t j = 0; j < grid.values.size(); ++j) grid.values[j] = {r1[j], r2[j]};
  return grid;
}

SpectralField from_physical(const PhysicalGrid& grid, LatticePtr lattice) {
  const int n = grid.size;
  check_grid_size(n, lattice->half_width());
  if (grid.values.size() != static_cast<std::size_t>(n) * n)
    throw std::invalid_argument("grid value count does not match its size");
  const auto& fft = detail::RealFft2d::get(n);
  auto& scratch = detail::thread_scratch(n);
  double* r1 = scratch.real[0].data();
  double* r2 = scratch.real[1].data();
  for (std::size_t j = 0; j < grid.values.size(); ++j) {
    if (!std::isfinite(grid.values[j][0]) || !std::isfinite(grid.values[j][1]))
      throw std::invalid_argument("grid contains non-finite values");
    r1[j] = grid.values[j][0];
    r2[j] = grid.values[j][1];
  }
  Complex* s1 = scratch.spec[0].data();
  Complex* s2 = scratch.spec[1].data();
  fft.forward(r1, s1);
  fft.forward(r2, s2);

  const double norm = kTwoPi / (static_cast<double>(n) * n);
  SpectralField out(std::move(lattice));
  const FreqLattice& lat = out.lattice();
  for (std::size_t i = 0; i < lat.size(); ++i) {
    const Mode k = lat[i];
    const Complex w1 = read_hermitian(s1, n, k);
    const Complex w2 = read_hermitian(s2, n, k);
    out[i] = (static_cast<double>(-k.k2) * w1 + static_cast<double>(k.k1) * w2) * (norm / k.norm());
  }
  return out;
}

SpectralField apply_stokes_power(const SpectralField& field, double s) {
  SpectralField out = field;
  const FreqLattice& lattice = field.lattice();
  if (s == 0.0) return out;
  for (std::size_t i = 0; i < lattice.size(); ++i)
    out[i] *= std::pow(static_cast<double>(lattice[i].norm2()), s);
  return out;
}

ScalarGrid vorticity(const SpectralField& field, int size) {
  const FreqLattice& lattice = field.lattice();
  check_grid_size(size, lattice.half_width());
  const auto& fft = detail::RealFft2d::get(size);
  auto& scratch = detail::thread_scratch(size);
  Complex* s = scratch.spec[0].data();
  scratch.spec[0].zero();
  // Exponential coefficient of d1 u2 - d2 u1 is i|k| u_k / (2 pi); negate it.
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    const Mode k = lattice[i];
    place_hermitian(s, size, k, Complex(0.0, -k.norm() / kTwoPi) * field[i]);
  }
  ScalarGrid out;
  out.size = size;
  out.values.resize(fft.real_size());
  fft.inverse(s, out.values.data());
  return out;
}

VectorSpectrum::VectorSpectrum(int half_width)
    : half_width_(half_width),
      data_(static_cast<std::size_t>(2 * half_width + 1) * (2 * half_width + 1), CVec2{}) {
  if (half_width < 0) throw std::invalid_argument("negative half-width");
}

std::size_t VectorSpectrum::offset(Mode k) const {
  if (k.max_abs() > half_width_) throw std::out_of_range("mode outside vector spectrum");
  return static_cast<std::size_t>(k.k1 + half_width_) * (2 * half_width_ + 1) + (k.k2 + half_width_);
}

VectorSpectrum to_vector_spectrum(const SpectralField& field) {
  const FreqLattice& lattice = field.lattice();
  VectorSpectrum out(lattice.half_width());
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    const Mode k = lattice[i];
    const double scale = 1.0 / (kTwoPi * k.norm());
    const CVec2 e{field[i] * (-k.k2 * scale), field[i] * (k.k1 * scale)};
    out(k) = e;
    out(-k) = {std::conj(e[0]), std::conj(e[1])};
  }
  return out;
}

SpectralField leray_project(const VectorSpectrum& spectrum, LatticePtr lattice) {
  SpectralField out(std::move(lattice));
  const FreqLattice& lat = out.lattice();
  for (std::size_t i = 0; i < lat.size(); ++i) {
    const Mode k = lat[i];
    if (k.max_abs() > spectrum.half_width()) continue;
    const CVec2& w = spectrum(k);
    out[i] = (static_cast<double>(-k.k2) * w[0] + static_cast<double>(k.k1) * w[1]) * (kTwoPi / k.norm());
  }
  return out;
}

}  // namespace nsesmc
