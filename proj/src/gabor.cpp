#include "scriptid/gabor.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>

#include <fftw3.h>
#include <fmt/format.h>

#include "scriptid/error.hpp"

namespace scriptid {

OrientationStep parse_orientation_step(std::string_view s) {
  if (s == "pi/6") return OrientationStep::kPiOver6;
  if (s == "pi/8") return OrientationStep::kPiOver8;
  throw ParameterError(fmt::format("unknown orientation step '{}' (expected pi/6 or pi/8)", s));
}

std::string_view to_string(OrientationStep s) { return s == OrientationStep::kPiOver8 ? "pi/8" : "pi/6"; }

double step_radians(OrientationStep s) {
  return s == OrientationStep::kPiOver8 ? std::numbers::pi / 8.0 : std::numbers::pi / 6.0;
}

WaveVector wave_vector(int scale, int orientation, OrientationStep step) {
  if (scale < 1 || scale > kScaleCount) {
    throw ParameterError(fmt::format("scale index {} outside [1,{}]", scale, kScaleCount));
  }
  if (orientation < 0 || orientation >= kOrientationCount) {
    throw ParameterError(fmt::format("orientation index {} outside [0,{}]", orientation, kOrientationCount - 1));
  }
  WaveVector k;
  k.frequency = std::pow(2.0, -(scale + 1) / 2.0) * std::numbers::pi;
  k.orientation = orientation * step_radians(step);
  k.row = k.frequency * std::sin(k.orientation);
  k.col = k.frequency * std::cos(k.orientation);
  return k;
}

Complex gabor_wavelet(const WaveVector& k, double sigma, double x1, double x2) {
  const double k2 = k.frequency * k.frequency;
  const double s2 = sigma * sigma;
  const double envelope = (k2 / s2) * std::exp(-k2 * (x1 * x1 + x2 * x2) / (2.0 * s2));
  const double phase = k.row * x1 + k.col * x2;
  return envelope * Complex(std::cos(phase) - std::exp(-s2 / 2.0), std::sin(phase));
}

double GaborKernel::dc_ratio() const {
  Complex sum{};
  double abs_sum = 0.0;
  for (const Complex& v : values.values()) {
    sum += v;
    abs_sum += std::abs(v);
  }
  return abs_sum > 0.0 ? std::abs(sum) / abs_sum : 0.0;
}

GaborKernel make_kernel(int scale, int orientation, int size, double sigma, OrientationStep step) {
  if (size < 4) throw ParameterError(fmt::format("kernel size {} must be >= 4", size));
  if (!(sigma > 0.0)) throw ParameterError(fmt::format("gabor sigma must be > 0, got {}", sigma));
  GaborKernel kernel;
  kernel.scale = scale;
  kernel.orientation = orientation;
  kernel.size = size;
  kernel.sigma = sigma;
  kernel.wave = wave_vector(scale, orientation, step);
  kernel.values = ComplexGrid(static_cast<std::size_t>(size), static_cast<std::size_t>(size));
  const double center = (size - 1) / 2.0;
  for (int r = 0; r < size; ++r) {
    for (int c = 0; c < size; ++c) {
      kernel.values.at(r, c) = gabor_wavelet(kernel.wave, sigma, r - center, c - center);
    }
  }
  return kernel;
}

FilterBank make_filter_bank(int size, double sigma, OrientationStep step) {
  FilterBank bank;
  bank.size = size;
  bank.sigma = sigma;
  bank.step = step;
  bank.kernels.reserve(kSubbandCount);
  for (int nu = 1; nu <= kScaleCount; ++nu) {
    for (int mu = 0; mu < kOrientationCount; ++mu) bank.kernels.push_back(make_kernel(nu, mu, size, sigma, step));
  }
  return bank;
}

SubbandResponse convolve_direct(const GrayImage& block, const GaborKernel& kernel) {
  const auto h = static_cast<std::ptrdiff_t>(block.height());
  const auto w = static_cast<std::ptrdiff_t>(block.width());
  const auto k = static_cast<std::ptrdiff_t>(kernel.size);
  const std::ptrdiff_t anchor = (k - 1) / 2;
  SubbandResponse out{kernel.scale, kernel.orientation, ComplexGrid(block.width(), block.height())};
  for (std::ptrdiff_t y = 0; y < h; ++y) {
    for (std::ptrdiff_t x = 0; x < w; ++x) {
      Complex acc{};
      for (std::ptrdiff_t i = 0; i < k; ++i) {
        const std::ptrdiff_t sy = y + anchor - i;
        if (sy < 0 || sy >= h) continue;
        for (std::ptrdiff_t j = 0; j < k; ++j) {
          const std::ptrdiff_t sx = x + anchor - j;
          if (sx < 0 || sx >= w) continue;
          acc += kernel.values.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) *
                 block.at(static_cast<std::size_t>(sy), static_cast<std::size_t>(sx));
        }
      }
      out.values.at(static_cast<std::size_t>(y), static_cast<std::size_t>(x)) = acc;
    }
  }
  return out;
}

namespace {

// FFTW's planner is not thread-safe; plan creation and destruction go
// through this lock. fftw_execute_dft on an existing plan is safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwDeleter {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<fftw_complex[], FftwDeleter>;

FftwBuffer alloc_buffer(std::size_t n) {
  FftwBuffer buf(fftw_alloc_complex(n));
  if (!buf) throw std::bad_alloc();
  return buf;
}

class Plan {
 public:
  Plan(int rows, int cols, int sign) {
    auto in = alloc_buffer(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
    auto out = alloc_buffer(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft_2d(rows, cols, in.get(), out.get(), sign, FFTW_ESTIMATE);
    if (!plan_) throw Error("FFTW plan creation failed");
  }
  ~Plan() {
    if (plan_) {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(plan_);
    }
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;

  void execute(fftw_complex* in, fftw_complex* out) const { fftw_execute_dft(plan_, in, out); }

 private:
  fftw_plan plan_ = nullptr;
};

// Smallest n' >= n whose only prime factors are 2, 3, 5, 7.
std::size_t fft_size(std::size_t n) {
  for (std::size_t m = std::max<std::size_t>(n, 1);; ++m) {
    std::size_t r = m;
    for (std::size_t p : {2, 3, 5, 7}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return m;
  }
}

Complex* as_complex(fftw_complex* p) { return reinterpret_cast<Complex*>(p); }

}  // namespace

struct SpectralFilterBank::Impl {
  std::size_t block_w = 0;
  std::size_t block_h = 0;
  std::size_t fft_w = 0;
  std::size_t fft_h = 0;
  std::size_t anchor = 0;
  std::vector<std::pair<int, int>> ids;        // (scale, orientation) per kernel
  std::vector<std::vector<Complex>> spectra;  // kernel FFTs, fft_h x fft_w
  std::unique_ptr<Plan> forward;
  std::unique_ptr<Plan> inverse;

  std::size_t fft_count() const { return fft_w * fft_h; }
};

SpectralFilterBank::SpectralFilterBank(const FilterBank& bank, std::size_t block_width, std::size_t block_height)
    : impl_(std::make_unique<Impl>()) {
  if (block_width == 0 || block_height == 0) throw ParameterError("SpectralFilterBank: empty block size");
  if (bank.kernels.empty()) throw ParameterError("SpectralFilterBank: empty filter bank");
  auto& d = *impl_;
  const auto k = static_cast<std::size_t>(bank.size);
  d.block_w = block_width;
  d.block_h = block_height;
  d.fft_w = fft_size(block_width + k - 1);
  d.fft_h = fft_size(block_height + k - 1);
  d.anchor = (k - 1) / 2;
  d.forward = std::make_unique<Plan>(static_cast<int>(d.fft_h), static_cast<int>(d.fft_w), FFTW_FORWARD);
  d.inverse = std::make_unique<Plan>(static_cast<int>(d.fft_h), static_cast<int>(d.fft_w), FFTW_BACKWARD);

  auto in = alloc_buffer(d.fft_count());
  auto out = alloc_buffer(d.fft_count());
  for (const GaborKernel& kernel : bank.kernels) {
    if (static_cast<std::size_t>(kernel.size) != k) throw ParameterError("SpectralFilterBank: mixed kernel sizes");
    Complex* src = as_complex(in.get());
    std::fill(src, src + d.fft_count(), Complex{});
    for (std::size_t r = 0; r < k; ++r) {
      for (std::size_t c = 0; c < k; ++c) src[r * d.fft_w + c] = kernel.values.at(r, c);
    }
    d.forward->execute(in.get(), out.get());
    const Complex* spec = as_complex(out.get());
    d.spectra.emplace_back(spec, spec + d.fft_count());
    d.ids.emplace_back(kernel.scale, kernel.orientation);
  }
}

SpectralFilterBank::~SpectralFilterBank() = default;
SpectralFilterBank::SpectralFilterBank(SpectralFilterBank&&) noexcept = default;
SpectralFilterBank& SpectralFilterBank::operator=(SpectralFilterBank&&) noexcept = default;

std::size_t SpectralFilterBank::block_width() const { return impl_->block_w; }
std::size_t SpectralFilterBank::block_height() const { return impl_->block_h; }

std::vector<SubbandResponse> SpectralFilterBank::filter(const GrayImage& block) const {
  const auto& d = *impl_;
  if (block.width() != d.block_w || block.height() != d.block_h) {
    throw ParameterError(fmt::format("block is {}x{}, filter bank prepared for {}x{}", block.width(),
                                     block.height(), d.block_w, d.block_h));
  }
  const std::size_t n = d.fft_count();
  auto in = alloc_buffer(n);
  auto image_spec = alloc_buffer(n);
  auto work = alloc_buffer(n);

  Complex* src = as_complex(in.get());
  std::fill(src, src + n, Complex{});
  for (std::size_t r = 0; r < d.block_h; ++r) {
    for (std::size_t c = 0; c < d.block_w; ++c) src[r * d.fft_w + c] = block.at(r, c);
  }
  d.forward->execute(in.get(), image_spec.get());

  const Complex* img = as_complex(image_spec.get());
  const double scale = 1.0 / static_cast<double>(n);
  std::vector<SubbandResponse> responses;
  responses.reserve(d.spectra.size());
  for (std::size_t s = 0; s < d.spectra.size(); ++s) {
    Complex* prod = as_complex(in.get());
    const auto& kspec = d.spectra[s];
    for (std::size_t i = 0; i < n; ++i) prod[i] = img[i] * kspec[i];
    d.inverse->execute(in.get(), work.get());
    const Complex* full = as_complex(work.get());

    SubbandResponse resp{d.ids[s].first, d.ids[s].second, ComplexGrid(d.block_w, d.block_h)};
    for (std::size_t r = 0; r < d.block_h; ++r) {
      for (std::size_t c = 0; c < d.block_w; ++c) {
        resp.values.at(r, c) = full[(r + d.anchor) * d.fft_w + (c + d.anchor)] * scale;
      }
    }
    responses.push_back(std::move(resp));
  }
  return responses;
}

SubbandResponse convolve(const GrayImage& block, const GaborKernel& kernel) {
  FilterBank single;
  single.size = kernel.size;
  single.sigma = kernel.sigma;
  single.kernels.push_back(kernel);
  return std::move(SpectralFilterBank(single, block.width(), block.height()).filter(block).front());
}

std::vector<SubbandResponse> filter_block(const GrayImage& block, const FilterBank& bank) {
  return SpectralFilterBank(bank, block.width(), block.height()).filter(block);
}

namespace {

void write_csv_grid(const std::filesystem::path& path, const GaborKernel& k, bool imag) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  for (std::size_t r = 0; r < k.values.height(); ++r) {
    for (std::size_t c = 0; c < k.values.width(); ++c) {
      const Complex& v = k.values.at(r, c);
      out << (c ? "," : "") << fmt::format("{:.17g}", imag ? v.imag() : v.real());
    }
    out << '\n';
  }
  if (!out) throw IoError(fmt::format("error writing '{}'", path.string()));
}

void write_pgm_grid(const std::filesystem::path& path, const GaborKernel& k, bool imag) {
  std::vector<double> v;
  v.reserve(k.values.size());
  for (const Complex& z : k.values.values()) v.push_back(imag ? z.imag() : z.real());
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  const double range = *hi - *lo;
  std::vector<std::uint8_t> bytes(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    bytes[i] = range > 0.0 ? static_cast<std::uint8_t>(std::lround(255.0 * (v[i] - *lo) / range)) : 0;
  }
  save_pgm(path, k.values.width(), k.values.height(), bytes);
}

}  // namespace

std::vector<std::filesystem::path> dump_kernels(const FilterBank& bank, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError(fmt::format("cannot create '{}': {}", out_dir.string(), ec.message()));
  std::vector<std::filesystem::path> written;
  for (const GaborKernel& k : bank.kernels) {
    for (bool imag : {false, true}) {
      const std::string stem = fmt::format("kernel_v{}_o{}_{}", k.scale, k.orientation, imag ? "im" : "re");
      const auto csv = out_dir / (stem + ".csv");
      const auto pgm = out_dir / (stem + ".pgm");
      write_csv_grid(csv, k, imag);
      write_pgm_grid(pgm, k, imag);
      written.push_back(csv);
      written.push_back(pgm);
    }
  }
  return written;
}

}  // namespace scriptid
