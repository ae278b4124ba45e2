#include "ringqubit/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <memory>
#include <stdexcept>

namespace ringqubit::fft {

namespace {

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

template <typename T>
std::unique_ptr<T[], FftwFree> aligned(size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
  if (!p) throw std::bad_alloc();
  return std::unique_ptr<T[], FftwFree>(p);
}

}  // namespace

std::vector<std::complex<double>> rfft(std::span<const double> x) {
  const int n = static_cast<int>(x.size());
  if (n < 2) throw std::invalid_argument("rfft needs at least two samples");
  auto in = aligned<double>(n);
  auto out = aligned<fftw_complex>(n / 2 + 1);
  Plan plan(fftw_plan_dft_r2c_1d(n, in.get(), out.get(), FFTW_ESTIMATE));
  std::memcpy(in.get(), x.data(), sizeof(double) * n);
  fftw_execute(plan.get());
  std::vector<std::complex<double>> res(n / 2 + 1);
  for (int i = 0; i <= n / 2; ++i) res[i] = {out[i][0], out[i][1]};
  return res;
}

void fft2(std::vector<std::complex<double>>& data, int rows, int cols, int sign) {
  if (static_cast<size_t>(rows) * cols != data.size()) {
    throw std::invalid_argument("fft2: size mismatch");
  }
  auto buf = aligned<fftw_complex>(data.size());
  Plan plan(fftw_plan_dft_2d(rows, cols, buf.get(), buf.get(),
                             sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE));
  std::memcpy(buf.get(), data.data(), sizeof(fftw_complex) * data.size());
  fftw_execute(plan.get());
  std::memcpy(static_cast<void*>(data.data()), buf.get(), sizeof(fftw_complex) * data.size());
}

const char* backend_version() { return fftw_version; }

}  // namespace ringqubit::fft
