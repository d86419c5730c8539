// Serial reference schedule vs OpenMP schedule on one synthetic instance.
//
//   bench_gibbs [--n-other K] [--iterations I] [--threads N] [--features none|all]

#include "fbvar/gibbs.hpp"
#include "fbvar/synthetic.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace fbvar;

namespace {

double seconds_for(const std::function<void()>& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

int main(int argc, char** argv) {
  int n_other = 21, iterations = 50, threads = 4;
  std::string features = "all";
  CLI::App app{"Gibbs block timings, serial vs OpenMP"};
  app.add_option("--n-other", n_other, "OTHER variables on top of 2 instruments and 7 core series");
  app.add_option("--iterations", iterations, "timed iterations per schedule");
  app.add_option("--threads", threads, "OpenMP threads");
  app.add_option("--features", features, "none or all");
  CLI11_PARSE(app, argc, argv);

  TruthSpec ts;
  ts.n_other = n_other;
  const auto sim = simulate(ts, 42);
  const Dataset ds = standardize(sim.data);
  ModelSpec spec;
  spec.scheme = sim.truth.scheme;
  spec.r = ts.r;
  spec.seed = 7;
  if (features == "all") spec.features = {true, true, true};

  struct Block {
    const char* name;
    void (GibbsSampler::*step)();
  };
  const std::vector<Block> blocks{
      {"phi", &GibbsSampler::step_phi},           {"loadings", &GibbsSampler::step_loadings},
      {"factors", &GibbsSampler::step_factors},   {"variances", &GibbsSampler::step_variances},
      {"stochvol", &GibbsSampler::step_stochvol}, {"tv_loadings", &GibbsSampler::step_tv_loadings},
      {"dof", &GibbsSampler::step_dof},
  };

  std::printf("N = %d, T = %d, features = %s, iterations = %d, threads = %d\n", static_cast<int>(ds.cols()),
              static_cast<int>(ds.rows()) - spec.p, features.c_str(), iterations, threads);
  std::printf("%-12s %12s %12s %8s\n", "block", "serial ms", "openmp ms", "speedup");

  GibbsSampler serial(ds, spec, Exec::serial());
  GibbsSampler parallel(ds, spec, Exec::parallel(threads));
  std::vector<double> ts_serial(blocks.size()), ts_parallel(blocks.size());
  for (int it = 0; it < iterations; ++it) {
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      ts_serial[b] += seconds_for([&] { (serial.*blocks[b].step)(); });
      ts_parallel[b] += seconds_for([&] { (parallel.*blocks[b].step)(); });
    }
    serial.advance();
    parallel.advance();
  }
  double total_s = 0, total_p = 0;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    total_s += ts_serial[b];
    total_p += ts_parallel[b];
    std::printf("%-12s %12.3f %12.3f %8.2f\n", blocks[b].name, 1e3 * ts_serial[b] / iterations,
                1e3 * ts_parallel[b] / iterations, ts_parallel[b] > 0 ? ts_serial[b] / ts_parallel[b] : 0.0);
  }
  std::printf("%-12s %12.3f %12.3f %8.2f\n", "total", 1e3 * total_s / iterations, 1e3 * total_p / iterations,
              total_p > 0 ? total_s / total_p : 0.0);

  const bool same = serial.state().phi == parallel.state().phi && serial.state().loadings == parallel.state().loadings &&
                    serial.state().factors == parallel.state().factors;
  std::printf("serial and OpenMP states identical: %s\n", same ? "yes" : "NO");
  return same ? 0 : 1;
}
