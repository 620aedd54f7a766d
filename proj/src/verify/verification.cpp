// Copyright 2026 The Offload Planner Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "offload/verification.hpp"

#include <unistd.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "offload/error.hpp"
#include "offload/process.hpp"

namespace offload::verify {

namespace {

// A temporary file removed when the object goes away.
class TempFile {
 public:
  explicit TempFile(const std::string& contents) {
    auto pattern = (std::filesystem::temp_directory_path() /
                    "offload-baseline-XXXXXX")
                       .string();
    int fd = ::mkstemp(pattern.data());
    if (fd < 0) throw ConfigError("cannot create a temporary baseline file");
    ::close(fd);
    path_ = pattern;
    std::ofstream(path_, std::ios::binary) << contents;
  }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;
  ~TempFile() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

PerformanceResult run_sim_case(const TestCase& tc, const resource::Allocation& a,
                               const eval::Measurement& m,
                               const VerifyOptions& opts) {
  PerformanceResult r;
  r.name = tc.name;
  r.scaled_time = scaled_time(m, a);
  r.throughput = r.scaled_time > 0 ? 1 / r.scaled_time : 0;
  if (!m.valid) {
    r.note = "the planned pattern has no valid measurement";
    return r;
  }
  try {
    auto ast = minic::parse_program(*tc.source);
    auto loops = minic::extract_loops(ast);
    auto pattern = tc.pattern.value_or(model::OffloadPattern::zeros(loops.gene_length()));
    auto plan = model::plan_transfers(ast, loops, pattern);
    auto run = model::execute_offloaded(ast, loops, pattern, plan, opts.iteration_cap);
    minic::InterpretOptions io;
    io.iteration_cap = opts.iteration_cap;
    auto baseline = minic::interpret(minic::parse_program(*tc.baseline), io);
    r.diff = eval::compare_results(run.output, baseline, tc.tolerance);
    r.pass = r.diff->pass;
    if (!r.pass) r.note = "results differ from the baseline";
  } catch (const Error& e) {
    r.note = e.kind() + ": " + e.what();
  }
  return r;
}

PerformanceResult run_external_case(const TestCase& tc,
                                    const resource::Allocation& a,
                                    const VerifyOptions& opts) {
  PerformanceResult r;
  r.name = tc.name;
  try {
    TempFile baseline(*tc.baseline);
    std::string cmd = *tc.command;
    for (auto pos = cmd.find("{baseline}"); pos != std::string::npos;
         pos = cmd.find("{baseline}", pos))
      cmd.replace(pos, 10, shell_quote(baseline.path()));
    auto m = eval::evaluate_external(cmd, opts.artifacts, opts.timeout_seconds);
    r.measurement = m;
    r.pass = m.valid;
    if (m.valid) {
      r.scaled_time = scaled_time(m, a);
      r.throughput = r.scaled_time > 0 ? 1 / r.scaled_time : 0;
    } else {
      r.note = m.note;
    }
  } catch (const Error& e) {
    r.note = e.kind() + ": " + e.what();
  }
  return r;
}

RegressionResult run_regression(std::string name, std::string component,
                                const std::string& command,
                                const VerifyOptions& opts) {
  RegressionResult r;
  r.name = std::move(name);
  r.component = std::move(component);
  r.command = command;
  try {
    auto p = run_shell(command, opts.timeout_seconds);
    r.exit_code = p.exit_code;
    r.timed_out = p.timed_out;
    r.pass = !p.timed_out && p.exit_code == 0;
    if (p.timed_out) r.note = "timed out";
  } catch (const SpawnError& e) {
    r.note = std::string("SpawnError: ") + e.what();
  }
  return r;
}

template <typename Job>
void run_jobs(std::size_t count, std::size_t workers, const Job& job) {
  std::atomic<std::size_t> next{0};
  auto loop = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) job(i);
  };
  std::size_t n = std::min(std::max<std::size_t>(workers, 1), count);
  if (n <= 1) return loop();
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < n; ++t) threads.emplace_back(loop);
  for (auto& t : threads) t.join();
}

}  // namespace

double scaled_time(const eval::Measurement& m, const resource::Allocation& a) {
  auto part = [](double t, std::uint64_t units) {
    if (t == 0) return 0.0;
    return units == 0 ? std::numeric_limits<double>::infinity() : t / double(units);
  };
  return part(m.t_cpu, a.cpu_units) + part(m.t_dev, a.dev_units);
}

VerificationReport run_verification(const resource::Allocation& allocation,
                                    const eval::Measurement& measurement,
                                    const std::vector<TestCase>& tests,
                                    const SoftwareRegistry& registry,
                                    const std::vector<std::string>& components,
                                    const VerifyOptions& options) {
  struct Job {
    const TestCase* test = nullptr;
    std::string component;
    std::string command;
    std::string name;
  };
  std::vector<Job> perf_jobs, regr_jobs;
  for (const auto& tc : tests) {
    if (tc.kind == TestKind::Performance) {
      if (!tc.baseline)
        throw ConfigError("performance case '" + tc.name + "' has no baseline");
      if (!tc.source && !tc.command)
        throw ConfigError("performance case '" + tc.name +
                          "' needs a source program or a command");
      perf_jobs.push_back({&tc, "", "", tc.name});
    } else {
      if (!tc.command)
        throw ConfigError("regression case '" + tc.name + "' has no command");
      regr_jobs.push_back({&tc, "", *tc.command, tc.name});
    }
  }

  VerificationReport report;
  report.allocation = allocation;
  report.measurement = measurement;
  for (const auto& component : components) {
    auto it = registry.find(component);
    if (it == registry.end()) {
      report.uncovered_components.push_back(component);
      continue;
    }
    for (std::size_t k = 0; k < it->second.size(); ++k)
      regr_jobs.push_back({nullptr, component, it->second[k],
                           component + "#" + std::to_string(k + 1)});
  }

  report.performance.resize(perf_jobs.size());
  report.regression.resize(regr_jobs.size());
  std::size_t total = perf_jobs.size() + regr_jobs.size();
  run_jobs(total, options.workers, [&](std::size_t i) {
    if (i < perf_jobs.size()) {
      const auto& tc = *perf_jobs[i].test;
      report.performance[i] =
          tc.source ? run_sim_case(tc, allocation, measurement, options)
                    : run_external_case(tc, allocation, options);
    } else {
      const auto& job = regr_jobs[i - perf_jobs.size()];
      report.regression[i - perf_jobs.size()] =
          run_regression(job.name, job.component, job.command, options);
    }
  });

  bool ready = true;
  for (const auto& p : report.performance) ready = ready && p.pass;
  for (const auto& r : report.regression) ready = ready && r.pass;
  report.recommendation = ready ? Recommendation::Ready : Recommendation::Attention;
  return report;
}

std::string render_text(const VerificationReport& report) {
  std::ostringstream out;
  out.precision(6);
  const auto& a = report.allocation;
  out << "Verification report\n"
      << "Model: part times scale linearly with the number of units on their side.\n\n"
      << "Allocation: " << a.cpu_units << " CPU unit(s), " << a.dev_units
      << " device unit(s)" << (a.ratio_kept ? "" : " (ratio not kept)") << "\n"
      << "Monthly price: " << a.monthly_cost << "\n";
  if (report.measurement.valid)
    out << "Measured time: " << report.measurement.t_total << " s (CPU "
        << report.measurement.t_cpu << " s, device " << report.measurement.t_dev
        << " s)\n";
  else
    out << "Measured time: " << eval::kInfiniteTime << "\n";

  out << "\nPerformance cases\n";
  if (report.performance.empty()) out << "  (none)\n";
  for (const auto& p : report.performance) {
    out << "  [" << (p.pass ? "pass" : "FAIL") << "] " << p.name
        << ": scaled time " << p.scaled_time << " s, throughput "
        << p.throughput << " /s";
    if (p.diff && p.diff->worst)
      out << ", worst deviation " << p.diff->worst->deviation << " in "
          << p.diff->worst->variable << "[" << p.diff->worst->index << "]";
    if (!p.note.empty()) out << " (" << p.note << ")";
    out << "\n";
  }

  out << "\nRegression cases\n";
  if (report.regression.empty()) out << "  (none)\n";
  for (const auto& r : report.regression) {
    out << "  [" << (r.pass ? "pass" : "FAIL") << "] " << r.name << ": exit "
        << r.exit_code;
    if (!r.note.empty()) out << " (" << r.note << ")";
    out << "\n";
  }

  out << "\nUncovered components: ";
  if (report.uncovered_components.empty()) out << "none";
  for (std::size_t i = 0; i < report.uncovered_components.size(); ++i)
    out << (i ? ", " : "") << report.uncovered_components[i];
  out << "\n\nRecommendation: "
      << (report.recommendation == Recommendation::Ready ? "ready" : "attention")
      << "\n";
  return out.str();
}

}  // namespace offload::verify
