#pragma once

#include <complex>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <numbers>
#include <string_view>
#include <vector>

#include "scriptid/raster.hpp"

namespace scriptid {

using Complex = std::complex<double>;

inline constexpr int kScaleCount = 5;        // nu = 1..5
inline constexpr int kOrientationCount = 6;  // mu = 0..5
inline constexpr int kSubbandCount = kScaleCount * kOrientationCount;
inline constexpr double kDefaultGaborSigma = 2.0 * std::numbers::pi;
inline constexpr int kDefaultKernelSize = 16;

// Angular spacing between successive orientations mu.
enum class OrientationStep {
  kPiOver6,  // 0, 30, ..., 150 degrees
  kPiOver8,  // 0, 22.5, ..., 112.5 degrees
};

OrientationStep parse_orientation_step(std::string_view s);
std::string_view to_string(OrientationStep s);
double step_radians(OrientationStep s);

// Kernel coordinates are x = (x1, x2) = (row offset, column offset), so the
// wave vector (k sin phi, k cos phi) points along the columns at phi = 0.
struct WaveVector {
  double frequency = 0.0;    // k_nu = 2^(-(nu+1)/2) pi, radians per pixel
  double orientation = 0.0;  // phi_mu, radians
  double row = 0.0;          // k sin phi
  double col = 0.0;          // k cos phi
};

WaveVector wave_vector(int scale, int orientation, OrientationStep step = OrientationStep::kPiOver6);

// psi(x) = (k^2/s^2) exp(-k^2 |x|^2 / 2s^2) [exp(i k.x) - exp(-s^2/2)]
Complex gabor_wavelet(const WaveVector& k, double sigma, double x1, double x2);

// Dense complex grid, row-major.
class ComplexGrid {
 public:
  ComplexGrid() = default;
  ComplexGrid(std::size_t width, std::size_t height) : width_(width), height_(height), data_(width * height) {}

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t size() const { return data_.size(); }

  const Complex& at(std::size_t row, std::size_t col) const { return data_[row * width_ + col]; }
  Complex& at(std::size_t row, std::size_t col) { return data_[row * width_ + col]; }

  std::span<const Complex> values() const { return data_; }
  std::span<Complex> values() { return data_; }

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<Complex> data_;
};

struct GaborKernel {
  int scale = 1;
  int orientation = 0;
  int size = kDefaultKernelSize;
  double sigma = kDefaultGaborSigma;
  WaveVector wave;
  ComplexGrid values;  // size x size

  // |sum psi| / sum |psi|; zero for an exactly DC-free kernel.
  double dc_ratio() const;
};

// Samples the wavelet on a size x size grid centered at (size - 1) / 2,
// i.e. half-integer offsets for even sizes.
GaborKernel make_kernel(int scale, int orientation, int size = kDefaultKernelSize,
                        double sigma = kDefaultGaborSigma, OrientationStep step = OrientationStep::kPiOver6);

struct FilterBank {
  int size = kDefaultKernelSize;
  double sigma = kDefaultGaborSigma;
  OrientationStep step = OrientationStep::kPiOver6;
  std::vector<GaborKernel> kernels;  // index = 6 (nu - 1) + mu

  static constexpr std::size_t index(int scale, int orientation) {
    return static_cast<std::size_t>(kOrientationCount * (scale - 1) + orientation);
  }
  const GaborKernel& at(int scale, int orientation) const { return kernels[index(scale, orientation)]; }
};

FilterBank make_filter_bank(int size = kDefaultKernelSize, double sigma = kDefaultGaborSigma,
                            OrientationStep step = OrientationStep::kPiOver6);

struct SubbandResponse {
  int scale = 1;
  int orientation = 0;
  ComplexGrid values;  // same dimensions as the filtered block
};

// "Same"-size true convolution with zero padding:
//   J(y, x) = sum_{i,j} psi(i, j) I(y + a - i, x + a - j),  a = (size - 1) / 2
// convolve() takes the FFT route, convolve_direct() the nested-loop one.
SubbandResponse convolve(const GrayImage& block, const GaborKernel& kernel);
SubbandResponse convolve_direct(const GrayImage& block, const GaborKernel& kernel);

// Kernel spectra of a whole bank, prepared for one block size. Filtering
// many equally sized blocks through one instance transforms each block once.
// Instances are immutable after construction and safe to share.
class SpectralFilterBank {
 public:
  SpectralFilterBank(const FilterBank& bank, std::size_t block_width, std::size_t block_height);
  ~SpectralFilterBank();
  SpectralFilterBank(SpectralFilterBank&&) noexcept;
  SpectralFilterBank& operator=(SpectralFilterBank&&) noexcept;

  std::size_t block_width() const;
  std::size_t block_height() const;

  std::vector<SubbandResponse> filter(const GrayImage& block) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// All 30 responses of one block, in bank index order.
std::vector<SubbandResponse> filter_block(const GrayImage& block, const FilterBank& bank);

// Writes kernel_v{nu}_o{mu}_{re|im}.csv and .pgm for every kernel of the bank.
// Returns the written paths in bank order.
std::vector<std::filesystem::path> dump_kernels(const FilterBank& bank, const std::filesystem::path& out_dir);

}  // namespace scriptid
