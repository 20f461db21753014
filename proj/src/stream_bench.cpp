#include "cpapr/stream_bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <limits>
#include <ostream>
#include <vector>

#include <omp.h>

#include "cpapr/error.hpp"

namespace cpapr {
namespace {

int resolve_threads(int threads) { return threads > 0 ? threads : omp_get_max_threads(); }

std::string format_decimal(const Rational& q) {
  char buf[32];
  const double v = to_double(q);
  // Terminating within four decimals: the denominator divides 10^4.
  if (10000 % q.denominator() == 0) {
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    std::string s(buf);
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
    return s;
  }
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace

std::string StreamKernelInfo::printed_intensity() const { return format_decimal(intensity()); }

StreamKernelInfo info(StreamKernel kernel) {
  switch (kernel) {
    case StreamKernel::Copy: return {"copy", "A[i] = B[i]", 16, 0};
    case StreamKernel::Scale: return {"scale", "A[i] = s * B[i]", 16, 1};
    case StreamKernel::Add: return {"add", "A[i] = B[i] + C[i]", 24, 1};
    case StreamKernel::Triad: return {"triad", "A[i] = B[i] + s * C[i]", 24, 2};
  }
  throw ContractError("unknown STREAM kernel");
}

StreamKernel parse_stream_kernel(const std::string& name) {
  for (auto k : kAllStreamKernels)
    if (name == info(k).name) return k;
  throw ContractError("unknown STREAM kernel '" + name + "'");
}

void stream_copy(std::span<double> a, std::span<const double> b, int threads) {
  const std::size_t n = a.size();
#pragma omp parallel for schedule(static) num_threads(resolve_threads(threads))
  for (std::size_t i = 0; i < n; ++i) a[i] = b[i];
}

void stream_scale(std::span<double> a, std::span<const double> b, double s, int threads) {
  const std::size_t n = a.size();
#pragma omp parallel for schedule(static) num_threads(resolve_threads(threads))
  for (std::size_t i = 0; i < n; ++i) a[i] = s * b[i];
}

void stream_add(std::span<double> a, std::span<const double> b, std::span<const double> c,
                int threads) {
  const std::size_t n = a.size();
#pragma omp parallel for schedule(static) num_threads(resolve_threads(threads))
  for (std::size_t i = 0; i < n; ++i) a[i] = b[i] + c[i];
}

void stream_triad(std::span<double> a, std::span<const double> b, std::span<const double> c,
                  double s, int threads) {
  const std::size_t n = a.size();
#pragma omp parallel for schedule(static) num_threads(resolve_threads(threads))
  for (std::size_t i = 0; i < n; ++i) a[i] = b[i] + s * c[i];
}

std::vector<BandwidthResult> run_stream(const StreamOptions& opt) {
  if (opt.reps < 2) throw ContractError("STREAM needs reps >= 2 (the first is a warm-up)");
  if (opt.length == 0) throw ContractError("STREAM array length must be positive");
  if (opt.kernels.empty()) throw ContractError("no STREAM kernels selected");
  const int threads = resolve_threads(opt.threads);
  const std::size_t n = opt.length;

  std::vector<double> a, b, c;
  try {
    a.resize(n);
    b.resize(n);
    c.resize(n);
  } catch (const std::bad_alloc&) {
    throw std::runtime_error("cannot allocate STREAM arrays of length " + std::to_string(n));
  }
  const double a0 = 1.0, b0 = 2.0, c0 = 0.0;
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = a0;
    b[i] = b0;
    c[i] = c0;
  }

  auto selected = [&](StreamKernel k) {
    return std::find(opt.kernels.begin(), opt.kernels.end(), k) != opt.kernels.end();
  };
  const double s = opt.scalar;
  std::vector<std::vector<double>> seconds(4);
  using Clock = std::chrono::steady_clock;
  for (std::size_t rep = 0; rep < opt.reps; ++rep) {
    for (auto k : kAllStreamKernels) {
      if (!selected(k)) continue;
      const auto t0 = Clock::now();
      switch (k) {
        case StreamKernel::Copy: stream_copy(c, a, threads); break;
        case StreamKernel::Scale: stream_scale(b, c, s, threads); break;
        case StreamKernel::Add: stream_add(c, a, b, threads); break;
        case StreamKernel::Triad: stream_triad(a, b, c, s, threads); break;
      }
      const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
      if (rep > 0) seconds[static_cast<int>(k)].push_back(dt);
    }
  }

  // Replay the same operation sequence on scalars; every element must match.
  double ea = a0, eb = b0, ec = c0;
  for (std::size_t rep = 0; rep < opt.reps; ++rep) {
    if (selected(StreamKernel::Copy)) ec = ea;
    if (selected(StreamKernel::Scale)) eb = s * ec;
    if (selected(StreamKernel::Add)) ec = ea + eb;
    if (selected(StreamKernel::Triad)) ea = eb + s * ec;
  }
  std::size_t mismatches = 0;
#pragma omp parallel for schedule(static) num_threads(threads) reduction(+ : mismatches)
  for (std::size_t i = 0; i < n; ++i) mismatches += (a[i] != ea) + (b[i] != eb) + (c[i] != ec);
  const bool valid = mismatches == 0;

  std::vector<BandwidthResult> results;
  for (auto k : kAllStreamKernels) {
    if (!selected(k)) continue;
    const auto& t = seconds[static_cast<int>(k)];
    const StreamKernelInfo ki = info(k);
    BandwidthResult r;
    r.kernel = ki.name;
    r.stream = k;
    r.workload = std::to_string(n);
    r.reps = opt.reps;
    r.bytes = static_cast<double>(ki.bytes_per_iter) * static_cast<double>(n);
    const double best = *std::min_element(t.begin(), t.end());
    double total = 0;
    for (double x : t) total += x;
    const double avg = total / static_cast<double>(t.size());
    r.best_gbs = best > 0 ? r.bytes / best / 1e9 : std::numeric_limits<double>::infinity();
    r.mean_gbs = avg > 0 ? r.bytes / avg / 1e9 : std::numeric_limits<double>::infinity();
    r.validated = valid;
    results.push_back(r);
  }
  return results;
}

void attach_peak(std::vector<BandwidthResult>& results, const MachineSpec& machine) {
  validate(machine);
  for (auto& r : results) r.percent_of_peak = r.best_gbs / machine.bandwidth_gbs * 100.0;
}

void write_bandwidth_csv(std::ostream& out, const std::vector<BandwidthResult>& results) {
  char buf[320];
  out << "kernel,workload,bytes,ops,I,best_gbs,mean_gbs,pct_peak,validated\n";
  for (const auto& r : results) {
    std::string bytes_col, ops_col, i_col, pct_col;
    if (r.stream) {
      const auto ki = info(*r.stream);
      bytes_col = std::to_string(ki.bytes_per_iter);
      ops_col = std::to_string(ki.flops_per_iter);
      i_col = ki.printed_intensity();
    } else {
      std::snprintf(buf, sizeof(buf), "%.0f", r.bytes);
      bytes_col = buf;
    }
    if (r.percent_of_peak) {
      std::snprintf(buf, sizeof(buf), "%.3f", *r.percent_of_peak);
      pct_col = buf;
    }
    std::snprintf(buf, sizeof(buf), "%s,%s,%s,%s,%s,%.4f,%.4f,%s,%d\n", r.kernel.c_str(),
                  r.workload.c_str(), bytes_col.c_str(), ops_col.c_str(), i_col.c_str(),
                  r.best_gbs, r.mean_gbs, pct_col.c_str(), r.validated ? 1 : 0);
    out << buf;
  }
}

}  // namespace cpapr
