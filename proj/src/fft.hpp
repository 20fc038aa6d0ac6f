#pragma once

// Thin RAII layer over FFTW for square real <-> half-complex 2D transforms.

#include <complex>
#include <cstddef>

namespace nsesmc::detail {

/// FFTW-allocated (SIMD aligned) array. Move-only.
template <typename T>
class AlignedArray {
 public:
  AlignedArray() = default;
  explicit AlignedArray(std::size_t n);
  ~AlignedArray();
  AlignedArray(AlignedArray&& other) noexcept : data_(other.data_), size_(other.size_) {
    other.data_ = nullptr;
    other.size_ = 0;
  }
  AlignedArray& operator=(AlignedArray&& other) noexcept;
  AlignedArray(const AlignedArray&) = delete;
  AlignedArray& operator=(const AlignedArray&) = delete;

  T* data() noexcept { return data_; }
  const T* data() const noexcept { return data_; }
  std::size_t size() const noexcept { return size_; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }
  void zero();

 private:
  T* data_ = nullptr;
  std::size_t size_ = 0;
};

/// n x n real grid <-> n x (n/2+1) half spectrum, row-major, unnormalized.
/// Plans are built once per size (FFTW_ESTIMATE, so results do not depend on
/// planner timing) and executed concurrently through the new-array interface.
class RealFft2d {
 public:
  static const RealFft2d& get(int n);

  int n() const noexcept { return n_; }
  int half() const noexcept { return n_ / 2 + 1; }
  std::size_t real_size() const noexcept { return static_cast<std::size_t>(n_) * n_; }
  std::size_t spectral_size() const noexcept { return static_cast<std::size_t>(n_) * half(); }

  /// out(x) = sum_k spec(k) e^{+ik.x}. Destroys spec.
  void inverse(std::complex<double>* spec, double* out) const;
  /// spec(k) = sum_x in(x) e^{-ik.x}.
  void forward(const double* in, std::complex<double>* spec) const;

  ~RealFft2d();
  RealFft2d(const RealFft2d&) = delete;
  RealFft2d& operator=(const RealFft2d&) = delete;

 private:
  explicit RealFft2d(int n);

  int n_;
  void* inverse_plan_ = nullptr;
  void* forward_plan_ = nullptr;
};

/// Per-thread scratch buffers for one transform size.
struct FftScratch {
  AlignedArray<std::complex<double>> spec[3];
  AlignedArray<double> real[3];
};

FftScratch& thread_scratch(int n);

/// Row-major offset of frequency (k1, k2) with k2 >= 0 in the half spectrum.
inline std::size_t half_offset(int n, int k1, int k2) {
  const int row = k1 < 0 ? k1 + n : k1;
  return static_cast<std::size_t>(row) * (n / 2 + 1) + static_cast<std::size_t>(k2);
}

}  // namespace nsesmc::detail
