#include "fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <new>
#include <stdexcept>
#include <unordered_map>

namespace nsesmc::detail {

template <typename T>
AlignedArray<T>::AlignedArray(std::size_t n) : size_(n) {
  data_ = static_cast<T*>(fftw_malloc(sizeof(T) * (n == 0 ? 1 : n)));
  if (data_ == nullptr) throw std::bad_alloc();
  zero();
}

template <typename T>
AlignedArray<T>::~AlignedArray() {
  if (data_ != nullptr) fftw_free(data_);
}

template <typename T>
AlignedArray<T>& AlignedArray<T>::operator=(AlignedArray&& other) noexcept {
  if (this != &other) {
    if (data_ != nullptr) fftw_free(data_);
    data_ = other.data_;
    size_ = other.size_;
    other.data_ = nullptr;
    other.size_ = 0;
  }
  return *this;
}

template <typename T>
void AlignedArray<T>::zero() {
  if (size_ > 0) std::memset(static_cast<void*>(data_), 0, sizeof(T) * size_);
}

template class AlignedArray<double>;
template class AlignedArray<std::complex<double>>;

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

RealFft2d::RealFft2d(int n) : n_(n) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("transform size must be even and >= 2");
  AlignedArray<double> r(real_size());
  AlignedArray<std::complex<double>> c(spectral_size());
  auto* cc = reinterpret_cast<fftw_complex*>(c.data());
  inverse_plan_ = fftw_plan_dft_c2r_2d(n, n, cc, r.data(), FFTW_ESTIMATE);
  forward_plan_ = fftw_plan_dft_r2c_2d(n, n, r.data(), cc, FFTW_ESTIMATE);
  if (inverse_plan_ == nullptr || forward_plan_ == nullptr)
    throw std::runtime_error("FFTW planning failed");
}

RealFft2d::~RealFft2d() {
  std::lock_guard lock(planner_mutex());
  if (inverse_plan_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
  if (forward_plan_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
}

const RealFft2d& RealFft2d::get(int n) {
  // Mutex first so it outlives the cache during static destruction.
  auto& mutex = planner_mutex();
  static std::map<int, std::unique_ptr<RealFft2d>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, std::unique_ptr<RealFft2d>(new RealFft2d(n))).first;
  return *it->second;
}

void RealFft2d::inverse(std::complex<double>* spec, double* out) const {
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_), reinterpret_cast<fftw_complex*>(spec), out);
}

void RealFft2d::forward(const double* in, std::complex<double>* spec) const {
  // r2c plans never write their input.
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), const_cast<double*>(in),
                       reinterpret_cast<fftw_complex*>(spec));
}

FftScratch& thread_scratch(int n) {
  thread_local std::unordered_map<int, FftScratch> scratch;
  auto it = scratch.find(n);
  if (it == scratch.end()) {
    const auto& fft = RealFft2d::get(n);
    FftScratch s;
    for (auto& a : s.spec) a = AlignedArray<std::complex<double>>(fft.spectral_size());
    for (auto& a : s.real) a = AlignedArray<double>(fft.real_size());
    it = scratch.emplace(n, std::move(s)).first;
  }
  return it->second;
}

}  // namespace nsesmc::detail
