// Timing comparison between the serial reference kernels and their OpenMP
// counterparts, plus the FFT fast path against direct summation.

#include <chrono>
#include <cstdio>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "lemlab/kernels.hpp"

using namespace lemlab;

namespace {

template <typename F>
double time_ms(F&& f, int reps) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) f();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / double(reps);
}

}  // namespace

int main(int argc, char** argv) {
  const int M = argc > 1 ? std::atoi(argv[1]) : 4096;
  const int N = argc > 2 ? std::atoi(argv[2]) : M / 4 - 1;
  const int reps = argc > 3 ? std::atoi(argv[3]) : 20;

  std::mt19937_64 gen(42);
  std::vector<cplx> a(std::size_t(N + 1));
  for (auto& c : a) c = 0.1 * cplx(uniform01(gen) - 0.5, uniform01(gen) - 0.5);
  const double b = 1.0;

  std::vector<cplx> nodes(6);
  std::vector<int> mults(6, 1);
  for (auto& nd : nodes) nd = 0.5 * cplx(uniform01(gen) - 0.5, uniform01(gen) - 0.5);

  const auto samples = kernels::synth_laurent_serial(b, a, M);

#ifdef _OPENMP
  std::printf("M=%d N=%d reps=%d threads=%d\n", M, N, reps, omp_get_max_threads());
#else
  std::printf("M=%d N=%d reps=%d threads=1 (no OpenMP)\n", M, N, reps);
#endif
  std::printf("%-28s %12s %12s %8s\n", "kernel", "serial ms", "parallel ms", "speedup");

  auto report = [&](const char* name, double ts, double tp) {
    std::printf("%-28s %12.3f %12.3f %8.2fx\n", name, ts, tp, ts / tp);
  };

  report("synth_laurent",
         time_ms([&] { kernels::synth_laurent_serial(b, a, M); }, reps),
         time_ms([&] { kernels::synth_laurent_parallel(b, a, M); }, reps));
  report("synth_laurent_dtheta",
         time_ms([&] { kernels::synth_laurent_dtheta_serial(b, a, M); }, reps),
         time_ms([&] { kernels::synth_laurent_dtheta_parallel(b, a, M); }, reps));
  report("log_abs_factored",
         time_ms([&] { kernels::log_abs_factored_serial(0.0, nodes, mults, samples); }, reps),
         time_ms([&] { kernels::log_abs_factored_parallel(0.0, nodes, mults, samples); }, reps));
  report("im_conj_product_minus",
         time_ms([&] { kernels::im_conj_product_minus_serial(samples, samples, 1.0); }, reps),
         time_ms([&] { kernels::im_conj_product_minus_parallel(samples, samples, 1.0); }, reps));
  report("polygon_is_simple",
         time_ms([&] { kernels::polygon_is_simple_serial(samples); }, reps),
         time_ms([&] { kernels::polygon_is_simple_parallel(samples); }, reps));

  // FFT synthesis against the direct-summation reference.
  std::vector<cplx> spec(std::size_t(M), cplx(0.0));
  spec[1] = cplx(b);
  for (int k = 0; k <= N; ++k) spec[std::size_t((M - k) % M)] = a[std::size_t(k)];
  const double t_direct = time_ms([&] { kernels::synth_laurent_serial(b, a, M); }, reps);
  const double t_fft = time_ms([&] { auto s = spec; kernels::fft_pow2(s, +1); }, reps);
  std::printf("%-28s %12.3f %12.3f %8.2fx  (direct sum vs FFT)\n", "boundary synthesis",
              t_direct, t_fft, t_direct / t_fft);
  return 0;
}
