#pragma once

#include <mvst/pipeline.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace mvst {

struct BenchRow {
  Method method = Method::Ours;
  int views = 0;
  double median_ms = 0.0;
  double p10_ms = 0.0;
  double p90_ms = 0.0;
  std::vector<double> samples_ms;
};

struct BenchReport {
  std::vector<BenchRow> rows;

  // Row for (method, views); throws InvalidArgument when absent.
  [[nodiscard]] const BenchRow &at(Method method, int views) const;
  // median(largest view count) / median(smallest view count) for a method.
  [[nodiscard]] double scaling_ratio(Method method) const;

  // method,views,median_ms,p10_ms,p90_ms
  void write_csv(std::ostream &out) const;
  // Methods as rows, view counts as columns, plus the scaling ratio.
  void write_table(std::ostream &out) const;
};

struct BenchOptions {
  std::vector<Method> methods = {Method::Baseline, Method::Approach2, Method::Approach3,
                                 Method::Ours};
  std::vector<int> view_counts = {4, 8, 16};
  int repeats = 5;
  // Stylizer, filter, in-painting and thread settings; viewpoints are
  // replaced per cell.
  PipelineConfig config;
};

// Linear-interpolated percentile (q in [0,1]) of a non-empty sample.
double percentile(std::vector<double> samples, double q);

/// Times every (method, view count) cell: one discarded warm-up run per
/// scene, then `repeats` timed runs per scene with viewpoints evenly spaced
/// on [0,1]. Only the pipeline call is timed; scene loading is not.
BenchReport run_bench(const std::vector<StereoInput> &scenes, const BenchOptions &options);

// Scene directory layout: left.png, right.png, disp_left.pfm, disp_right.pfm.
StereoInput load_scene(const std::filesystem::path &dir);
void save_scene(const StereoInput &scene, const std::filesystem::path &dir);

BenchReport run_bench(const std::vector<std::filesystem::path> &scene_dirs,
                      const BenchOptions &options);

} // namespace mvst
