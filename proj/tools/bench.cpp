// Benchmark and verification driver: burgers, spline and linear-solve cases with JSON/CSV reports.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <thread>

#include <omp.h>

#include "dslad/verification/burgers.hpp"
#include "dslad/verification/linear_solve.hpp"
#include "dslad/verification/spline.hpp"

using namespace dslad::verification;
using nlohmann::json;

namespace {

constexpr int kUsageError = 1;
constexpr int kCheckFailed = 3;

struct Common {
  std::uint64_t seed = 2024;
  int repetitions = 1;
  std::string precision = "auto";
  std::string jsonPath;
  std::string csvPath;
  bool checkGrad = false;
};

struct BurgersOptions {
  int grid = 21;
  int steps = 8;
  double reynolds = 100.0;
  int fdNodes = 50;
};

struct SplineOptions {
  int regions = 16;
  std::size_t samples = 100000;
  std::string mode = "both";
  int replicas = 1;
  std::size_t fdSamples = 1000;
};

struct SolveOptions {
  int n = 10;
  std::string path = "all";
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void requirePrecision(const Common& c, const char* supported, const char* benchCase) {
  if (c.precision != "auto" && c.precision != supported) {
    throw UsageError(std::string(benchCase) + " runs in " + supported + " precision only");
  }
}

void stamp(BenchReport& r, const Common& c) {
  r.config["seed"] = c.seed;
  r.config["rng"] = "mt19937_64";
  r.config["repetitions"] = c.repetitions;
}

/// Runs `once` repetitions times, keeps the last report and averages the timings.
template <typename F>
auto repeated(const Common& c, F once) {
  auto result = once();
  double record = result.report.recordSeconds;
  double reverse = result.report.reverseSeconds;
  for (int k = 1; k < c.repetitions; ++k) {
    result = once();
    record += result.report.recordSeconds;
    reverse += result.report.reverseSeconds;
  }
  result.report.recordSeconds = record / c.repetitions;
  result.report.reverseSeconds = reverse / c.repetitions;
  return result;
}

std::vector<BenchReport> runBurgers(const Common& c, const BurgersOptions& o) {
  requirePrecision(c, "double", "burgers");
  const BurgersConfig config{o.grid, o.steps, o.reynolds};
  validate(config);
  auto g = repeated(c, [&] { return burgersGradient(config); });
  if (c.checkGrad) {
    g.report.gradCheck = burgersGradientCheck(config, g.gradient, o.fdNodes, c.seed);
    g.report.extra["dotProductRelErr"] = burgersDotProductError(config, g.gradient, c.seed);
  }
  stamp(g.report, c);
  return {g.report};
}

std::vector<BenchReport> runSpline(const Common& c, const SplineOptions& o) {
  requirePrecision(c, "single", "spline");
  const SplineConfig config{o.regions, o.samples, c.seed};
  validate(config);
  const SplineGrid grid(config.regions);
  const auto samples = splineSamples(config);
  std::vector<SplineMode> modes;
  if (o.mode != "vectorized") {
    modes.push_back(SplineMode::Scalar);
  }
  if (o.mode != "scalar") {
    modes.push_back(SplineMode::Vectorized);
  }
  std::vector<BenchReport> out;
  std::vector<std::vector<float>> points;
  for (SplineMode mode : modes) {
    auto r = repeated(c, [&] { return splineStudy(grid, samples, mode); });
    if (c.checkGrad) {
      r.report.gradCheck = splineGradientCheck(grid, samples, r.gradient, o.fdSamples);
    }
    if (o.replicas > 1) {
      // Independent tapes, one per thread; only the wall time is reported.
      Stopwatch wall;
#pragma omp parallel for num_threads(o.replicas) schedule(static, 1)
      for (int k = 0; k < o.replicas; ++k) {
        (void)splineStudy(grid, samples, mode);
      }
      r.report.extra["replicas"] = o.replicas;
      r.report.extra["replicatedWall_s"] = wall.seconds();
    }
    stamp(r.report, c);
    points.push_back(std::move(r.points));
    out.push_back(std::move(r.report));
  }
  if (out.size() == 2) {
    std::uint32_t worst = 0;
    for (std::size_t k = 0; k < points[0].size(); ++k) {
      worst = std::max(worst, ulpDistance(points[0][k], points[1][k]));
    }
    const double ratio = static_cast<double>(out[1].memory.streamBytes()) / out[0].memory.streamBytes();
    out[1].extra["maxUlpVsScalar"] = worst;
    out[1].extra["memoryRatioVsScalar"] = ratio;
  }
  return out;
}

std::vector<BenchReport> runSolve(const Common& c, const SolveOptions& o) {
  requirePrecision(c, "double", "solve");
  const auto problem = makeSolveProblem(o.n, c.seed);
  std::vector<SolvePath> paths;
  if (o.path == "all" || o.path == "dsl") {
    paths.push_back(SolvePath::Dsl);
  }
  if (o.path == "all" || o.path == "gauss-jordan") {
    paths.push_back(SolvePath::ScalarGaussJordan);
  }
  if (o.path == "all" || o.path == "elimination") {
    paths.push_back(SolvePath::ScalarElimination);
  }
  std::vector<BenchReport> out;
  for (SolvePath path : paths) {
    auto r = repeated(c, [&] { return solveStudy(problem, path); });
    if (!c.checkGrad) {
      r.report.gradCheck.reset();
    }
    stamp(r.report, c);
    out.push_back(std::move(r.report));
  }
  if (o.path == "all") {
    const double dslBytes = static_cast<double>(out[0].memory.streamBytes());
    out[1].extra["memoryRatioVsDsl"] = out[1].memory.streamBytes() / dslBytes;
    out[2].extra["memoryRatioVsDsl"] = out[2].memory.streamBytes() / dslBytes;
  }
  return out;
}

void write(const std::vector<BenchReport>& reports, const Common& c) {
  json doc = {{"reports", json::array()}, {"threads", omp_get_max_threads()}};
  for (const auto& r : reports) {
    doc["reports"].push_back(toJson(r));
  }
  if (c.jsonPath.empty() || c.jsonPath == "-") {
    std::cout << doc.dump(2) << "\n";
  } else {
    std::ofstream out(c.jsonPath);
    if (!out) {
      throw std::runtime_error("cannot write " + c.jsonPath);
    }
    out << doc.dump(2) << "\n";
  }
  if (!c.csvPath.empty()) {
    std::ofstream out(c.csvPath);
    if (!out) {
      throw std::runtime_error("cannot write " + c.csvPath);
    }
    out << csvHeader() << "\n";
    for (const auto& r : reports) {
      out << csvRow(r) << "\n";
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bench: Burgers, spline and linear-solve studies of the dslad tape"};
  app.require_subcommand(1);
  Common common;
  BurgersOptions burgers;
  SplineOptions spline;
  SolveOptions solve;

  auto addCommon = [&](CLI::App* sub) {
    sub->add_option("--seed", common.seed, "seed of the mt19937_64 generator")->capture_default_str();
    sub->add_option("--repetitions", common.repetitions, "runs averaged for the timings")
        ->check(CLI::Range(1, 1000))
        ->capture_default_str();
    sub->add_option("--precision", common.precision, "single or double; each case supports one")
        ->check(CLI::IsMember({"auto", "single", "double"}))
        ->capture_default_str();
    sub->add_option("--json", common.jsonPath, "JSON report path, '-' for stdout (default)");
    sub->add_option("--csv", common.csvPath, "CSV report path");
    sub->add_flag("--check-grad", common.checkGrad, "verify gradients against finite differences");
  };

  auto* b = app.add_subcommand("burgers", "gradient of the coupled Burgers solver");
  addCommon(b);
  b->add_option("--grid", burgers.grid, "grid points per dimension")->check(CLI::Range(3, 601))->capture_default_str();
  b->add_option("--steps", burgers.steps, "time steps")->check(CLI::Range(0, 10000))->capture_default_str();
  b->add_option("--reynolds", burgers.reynolds, "Reynolds number")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  b->add_option("--fd-nodes", burgers.fdNodes, "interior nodes checked by finite differences")
      ->check(CLI::Range(1, 1000000))
      ->capture_default_str();

  auto* s = app.add_subcommand("spline", "scalar vs vectorized bicubic spline");
  addCommon(s);
  s->add_option("--regions", spline.regions, "regions per dimension")->check(CLI::Range(1, 4096))->capture_default_str();
  s->add_option("--samples", spline.samples, "sample points")->check(CLI::Range(1, 100000000))->capture_default_str();
  s->add_option("--mode", spline.mode, "scalar, vectorized or both")
      ->check(CLI::IsMember({"scalar", "vectorized", "both"}))
      ->capture_default_str();
  s->add_option("--replicas", spline.replicas, "independent tapes on that many threads")
      ->check(CLI::Range(1, 256))
      ->capture_default_str();
  s->add_option("--fd-samples", spline.fdSamples, "samples checked by finite differences")->capture_default_str();

  auto* l = app.add_subcommand("solve", "linear solve r = M^-1 (v2 - v1) + v1, scalar vs DSL");
  addCommon(l);
  l->add_option("--n", solve.n, "system size")->check(CLI::Range(1, 200))->capture_default_str();
  l->add_option("--path", solve.path, "dsl, gauss-jordan, elimination or all")
      ->check(CLI::IsMember({"dsl", "gauss-jordan", "elimination", "all"}))
      ->capture_default_str();

  auto* all = app.add_subcommand("all", "every case with default sizes");
  addCommon(all);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  std::vector<BenchReport> reports;
  try {
    auto append = [&](std::vector<BenchReport> r) {
      for (auto& x : r) {
        reports.push_back(std::move(x));
      }
    };
    if (b->parsed()) {
      append(runBurgers(common, burgers));
    } else if (s->parsed()) {
      append(runSpline(common, spline));
    } else if (l->parsed()) {
      append(runSolve(common, solve));
    } else {
      const std::string precision = common.precision;
      common.precision = "auto";
      append(runBurgers(common, burgers));
      append(runSpline(common, spline));
      append(runSolve(common, solve));
      common.precision = precision;
    }
    write(reports, common);
  } catch (const UsageError& e) {
    std::cerr << "bench: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "bench: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "bench: " << e.what() << "\n";
    return 2;
  }

  bool ok = true;
  for (const auto& r : reports) {
    if (r.gradCheck && !r.gradCheck->pass) {
      std::cerr << "bench: gradient check failed for " << r.caseName << " (max rel err " << r.gradCheck->maxRelErr
                << ", tolerance " << r.gradCheck->tolerance << ")\n";
      ok = false;
    }
  }
  return ok ? 0 : kCheckFailed;
}
