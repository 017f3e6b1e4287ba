#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "vidiag/media/frame.h"
#include "vidiag/media/metrics.h"

using namespace vidiag::media;
using Clock = std::chrono::steady_clock;

namespace {

double time_ms(const std::function<double()>& fn, int reps, double& checksum) {
  // Warm-up pass, then the timed loop.
  checksum += fn();
  const auto start = Clock::now();
  for (int i = 0; i < reps; ++i) checksum += fn();
  const auto stop = Clock::now();
  return std::chrono::duration<double, std::milli>(stop - start).count() /
         static_cast<double>(reps);
}

struct Kernel {
  const char* name;
  double (*parallel)(const Frame&, const Frame&);
  double (*reference)(const Frame&, const Frame&);
};

}  // namespace

int main(int argc, char** argv) {
  const int reps = argc > 1 ? std::atoi(argv[1]) : 20;

  const Kernel kernels[] = {
      {"ssim", &compute_ssim, &serial::compute_ssim},
      {"hist_shift", &compute_hist_shift, &serial::compute_hist_shift},
      {"flow_magnitude", &compute_flow_magnitude, &serial::compute_flow_magnitude},
  };
  const int sizes[][2] = {{320, 240}, {640, 480}, {1280, 720}};

  std::printf("%-16s %10s %12s %12s %9s\n", "kernel", "size", "parallel_ms", "serial_ms",
              "speedup");
  double checksum = 0.0;
  for (const auto& [w, h] : sizes) {
    const Frame a = textured_frame(w, h, 11);
    const Frame b = add_luma_noise(shift_wrap(a, 3, 1), 2.0, 12);
    for (const auto& k : kernels) {
      const double par = time_ms([&] { return k.parallel(a, b); }, reps, checksum);
      const double ser = time_ms([&] { return k.reference(a, b); }, reps, checksum);
      // Agreement is a hard contract, not just a benchmark nicety.
      if (k.parallel(a, b) != k.reference(a, b)) {
        std::fprintf(stderr, "FATAL: %s diverges from its serial reference at %dx%d\n",
                     k.name, w, h);
        return 1;
      }
      std::printf("%-16s %6dx%-4d %11.3f %11.3f %8.2fx\n", k.name, w, h, par, ser,
                  ser / par);
    }
  }
  std::printf("(checksum %.6f over %d reps per cell)\n", checksum, reps);
  return 0;
}
