// Throughput comparison of the OpenMP path kernels against the serial
// reference, with a bitwise-identity check on the results.
#include <chrono>
#include <cstdio>
#include <cstring>

#include "nilheat/control.hpp"
#include "nilheat/parser.hpp"
#include "nilheat/sde.hpp"

using namespace nilheat;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

VectorField make_field(const std::string& comps, int n) {
  return VectorField(parse_components(comps, n, 12));
}

}  // namespace

int main(int argc, char** argv) {
  long long paths = argc > 1 ? std::atoll(argv[1]) : 200000;

  // 3D step-2 fixture: two generators with a rotational commutator.
  VectorField drift = make_field("0, 0, 0", 3);
  std::vector<VectorField> diff = {make_field("1, 0, 0 - 1/2*x2", 3),
                                   make_field("0, 1, 1/2*x1", 3)};
  std::vector<double> x0(3, 0.0);

  EnsembleConfig cfg;
  cfg.n_paths = paths;
  cfg.steps = 400;
  cfg.t_final = 1.0;

  std::printf("endpoint kernel, %lld paths x %d steps\n", paths, cfg.steps);
  cfg.parallel = false;
  auto t0 = std::chrono::steady_clock::now();
  Ensemble serial = simulate_endpoints(drift, diff, x0, cfg);
  double ts = seconds_since(t0);
  std::printf("  serial : %8.3f s  (%.2f Msteps/s)\n", ts,
              paths * static_cast<double>(cfg.steps) / ts / 1e6);

  cfg.parallel = true;
  t0 = std::chrono::steady_clock::now();
  Ensemble parallel = simulate_endpoints(drift, diff, x0, cfg);
  double tp = seconds_since(t0);
  std::printf("  openmp : %8.3f s  (%.2f Msteps/s)  speedup %.2fx\n", tp,
              paths * static_cast<double>(cfg.steps) / tp / 1e6, ts / tp);

  bool identical = serial.kept == parallel.kept &&
                   std::memcmp(serial.endpoints.data(), parallel.endpoints.data(),
                               serial.endpoints.size() * sizeof(double)) == 0;
  std::printf("  results bit-identical: %s\n", identical ? "yes" : "NO");

  PolySystem sys{drift, diff};
  McConfig mc;
  mc.rollouts = 2000;
  std::vector<int> weights = {1, 1, 2};
  std::printf("reachability kernel, %d rollouts\n", mc.rollouts);
  mc.parallel = false;
  t0 = std::chrono::steady_clock::now();
  CoverageReport rs = mc_reachability(sys, weights, mc);
  ts = seconds_since(t0);
  std::printf("  serial : %8.3f s\n", ts);
  mc.parallel = true;
  t0 = std::chrono::steady_clock::now();
  CoverageReport rp = mc_reachability(sys, weights, mc);
  tp = seconds_since(t0);
  std::printf("  openmp : %8.3f s  speedup %.2fx\n", tp, ts / tp);
  std::printf("  coverage identical: %s\n",
              rs.orthants_hit == rp.orthants_hit && rs.radius_q50 == rp.radius_q50 ? "yes"
                                                                                   : "NO");
  return identical ? 0 : 1;
}
