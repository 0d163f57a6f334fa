#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <memory>
#include <mutex>

namespace invtest::detail {

// Cached FFTW plans, one pair per transform size. Plan creation is serialized
// (the FFTW planner is not thread safe); executing a plan through the
// new-array interface is safe from multiple threads. Plans are created with
// FFTW_ESTIMATE so results do not depend on runtime timing.
class Fft {
 public:
  static const Fft& of_size(int n) {
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<Fft>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto& slot = cache[n];
    if (!slot) slot.reset(new Fft(n));
    return *slot;
  }

  void forward(const std::complex<double>* in, std::complex<double>* out) const {
    fftw_execute_dft(fwd_, to_fftw(in), to_fftw(out));
  }

  // Unnormalized inverse (plain conjugate-exponent sum).
  void inverse(const std::complex<double>* in, std::complex<double>* out) const {
    fftw_execute_dft(inv_, to_fftw(in), to_fftw(out));
  }

  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  ~Fft() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(inv_);
  }

 private:
  explicit Fft(int n) : n_(n) {
    std::vector<std::complex<double>> a(n), b(n);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fwd_ = fftw_plan_dft_1d(n, to_fftw(a.data()), to_fftw(b.data()), FFTW_FORWARD, flags);
    inv_ = fftw_plan_dft_1d(n, to_fftw(a.data()), to_fftw(b.data()), FFTW_BACKWARD, flags);
  }

  static fftw_complex* to_fftw(const std::complex<double>* p) {
    return reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(p));
  }

  int n_;
  fftw_plan fwd_;
  fftw_plan inv_;
};

}  // namespace invtest::detail
