#include <mvst/bench.hpp>

#include <mvst/image_io.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace mvst {
namespace {

void validate(const BenchOptions &options) {
  if (options.methods.empty()) {
    throw InvalidArgument("bench needs at least one method");
  }
  if (options.view_counts.empty()) {
    throw InvalidArgument("bench needs at least one view count");
  }
  for (const int n : options.view_counts) {
    if (n < 1) {
      throw InvalidArgument("view counts must be at least 1");
    }
  }
  if (options.repeats < 3) {
    throw InvalidArgument("bench needs at least 3 repeats");
  }
}

} // namespace

double percentile(std::vector<double> samples, double q) {
  if (samples.empty()) {
    throw InvalidArgument("percentile of an empty sample");
  }
  std::sort(samples.begin(), samples.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(samples.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, samples.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return samples[lo] + (samples[hi] - samples[lo]) * frac;
}

const BenchRow &BenchReport::at(Method method, int views) const {
  const auto it = std::find_if(rows.begin(), rows.end(), [&](const BenchRow &r) {
    return r.method == method && r.views == views;
  });
  if (it == rows.end()) {
    throw InvalidArgument("no bench row for " + std::string(to_string(method)) + " at " +
                          std::to_string(views) + " views");
  }
  return *it;
}

double BenchReport::scaling_ratio(Method method) const {
  const BenchRow *smallest = nullptr;
  const BenchRow *largest = nullptr;
  for (const auto &row : rows) {
    if (row.method != method) {
      continue;
    }
    if (smallest == nullptr || row.views < smallest->views) {
      smallest = &row;
    }
    if (largest == nullptr || row.views > largest->views) {
      largest = &row;
    }
  }
  if (smallest == nullptr) {
    throw InvalidArgument("no bench rows for " + std::string(to_string(method)));
  }
  return largest->median_ms / smallest->median_ms;
}

void BenchReport::write_csv(std::ostream &out) const {
  out << "method,views,median_ms,p10_ms,p90_ms\n";
  const auto flags = out.flags();
  out << std::fixed << std::setprecision(3);
  for (const auto &row : rows) {
    out << to_string(row.method) << ',' << row.views << ',' << row.median_ms << ','
        << row.p10_ms << ',' << row.p90_ms << '\n';
  }
  out.flags(flags);
}

void BenchReport::write_table(std::ostream &out) const {
  std::vector<int> counts;
  std::vector<Method> methods;
  for (const auto &row : rows) {
    if (std::find(counts.begin(), counts.end(), row.views) == counts.end()) {
      counts.push_back(row.views);
    }
    if (std::find(methods.begin(), methods.end(), row.method) == methods.end()) {
      methods.push_back(row.method);
    }
  }
  std::sort(counts.begin(), counts.end());

  std::ostringstream head;
  head << std::left << std::setw(12) << "method";
  for (const int n : counts) {
    head << std::right << std::setw(12) << (std::to_string(n) + " views");
  }
  head << std::right << std::setw(12) << "ratio";
  out << "median time (ms)\n" << head.str() << '\n';
  for (const auto m : methods) {
    out << std::left << std::setw(12) << to_string(m) << std::right << std::fixed
        << std::setprecision(1);
    for (const int n : counts) {
      const auto it = std::find_if(rows.begin(), rows.end(), [&](const BenchRow &r) {
        return r.method == m && r.views == n;
      });
      if (it == rows.end()) {
        out << std::setw(12) << "-";
      } else {
        out << std::setw(12) << it->median_ms;
      }
    }
    out << std::setw(12) << std::setprecision(2) << scaling_ratio(m) << '\n';
  }
}

BenchReport run_bench(const std::vector<StereoInput> &scenes, const BenchOptions &options) {
  validate(options);
  if (scenes.empty()) {
    throw InvalidArgument("bench needs at least one scene");
  }
  const auto stylizer = make_stylizer(options.config.stylizer);

  BenchReport report;
  for (const auto method : options.methods) {
    for (const int n : options.view_counts) {
      PipelineConfig config = options.config;
      config.viewpoints = evenly_spaced_viewpoints(n);
      BenchRow row{method, n, 0.0, 0.0, 0.0, {}};
      for (const auto &scene : scenes) {
        (void)run_method(method, scene, config, *stylizer);
        for (int r = 0; r < options.repeats; ++r) {
          const auto start = std::chrono::steady_clock::now();
          (void)run_method(method, scene, config, *stylizer);
          row.samples_ms.push_back(
              std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                  .count());
        }
      }
      row.median_ms = percentile(row.samples_ms, 0.5);
      row.p10_ms = percentile(row.samples_ms, 0.1);
      row.p90_ms = percentile(row.samples_ms, 0.9);
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

StereoInput load_scene(const std::filesystem::path &dir) {
  StereoInput scene{load_image(dir / "left.png"), load_image(dir / "right.png"),
                    load_disparity(dir / "disp_left.pfm", Direction::LeftToRight),
                    load_disparity(dir / "disp_right.pfm", Direction::RightToLeft)};
  validate(scene);
  return scene;
}

void save_scene(const StereoInput &scene, const std::filesystem::path &dir) {
  std::filesystem::create_directories(dir);
  save_image(scene.left, dir / "left.png");
  save_image(scene.right, dir / "right.png");
  save_disparity(scene.disp_left, dir / "disp_left.pfm");
  save_disparity(scene.disp_right, dir / "disp_right.pfm");
}

BenchReport run_bench(const std::vector<std::filesystem::path> &scene_dirs,
                      const BenchOptions &options) {
  std::vector<StereoInput> scenes;
  scenes.reserve(scene_dirs.size());
  for (const auto &dir : scene_dirs) {
    scenes.push_back(load_scene(dir));
  }
  return run_bench(scenes, options);
}

} // namespace mvst
