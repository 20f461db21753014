#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <boost/rational.hpp>

namespace cpapr {

using Rational = boost::rational<std::int64_t>;

inline double to_double(const Rational& q) { return boost::rational_cast<double>(q); }

struct MachineSpec {
  std::string name;
  double clock_ghz = 0;
  double cores_per_socket = 0;
  double ops_per_cycle = 0;
  double sockets = 0;
  double bandwidth_gbs = 0;
};

/// Throws ContractError unless every numeric field is positive.
void validate(const MachineSpec& machine);

/// JSON object {name, clock_ghz, cores_per_socket, ops_per_cycle, sockets,
/// bandwidth_gbs}. Throws InputError on missing/ill-typed fields.
MachineSpec parse_machine_spec(const std::string& json_text);
MachineSpec load_machine_spec(const std::string& path);

/// Resolves "--machine" arguments: an existing path is loaded directly,
/// otherwise `<dir>/<name>.json` where dir is $CPAPR_MACHINE_DIR or the
/// bundled data/machines directory.
MachineSpec resolve_machine_spec(const std::string& name_or_path);
std::string default_machine_dir();

enum class CostVariant { BaseGpuStyle, CpuChunked };

struct KernelCostModel {
  CostVariant variant = CostVariant::BaseGpuStyle;
  std::int64_t rank = 1;
  std::int64_t chunk = 1;  // V, CpuChunked only
  std::int64_t word_bytes = 8;

  std::string label() const;
};

struct WorkTraffic {
  Rational flops;
  Rational words;
};

/// BaseGpuStyle: W = nnz(4R + 2), Q = nnz(5R + 2).
/// CpuChunked:   W = nnz(4R + R/V + 3), Q = nnz(6R + 2R/V + 3).
WorkTraffic work_and_traffic(const KernelCostModel& model, std::int64_t nnz);

struct Intensity {
  Rational exact;   // W / (Q * word_bytes), FLOPs per byte
  double value;     // exact as double
  double quoted;    // headline value published for this variant (0.125 / 0.27)
};

Intensity operational_intensity(const KernelCostModel& model, std::int64_t nnz);

/// clock x cores x ops/cycle x sockets, GFLOP/s.
double peak_flops(const MachineSpec& machine);

/// min(peak, bandwidth x I), GFLOP/s.
double attainable(const MachineSpec& machine, double intensity);

/// Intensity where the bandwidth slope meets the compute plateau.
double balance_point(const MachineSpec& machine);

struct RooflineOptions {
  int min_exp = -7;
  int max_exp = 7;
  int samples_per_octave = 4;
  bool quoted_markers = false;  // also emit markers at the published intensities
};

/// CSV: series,label,I,P. Rows "roofline" sample the bound over
/// [2^min_exp, 2^max_exp], one "balance" row, then one "marker" row per model
/// (plus "quoted" rows when requested).
void emit_roofline(std::ostream& out, const MachineSpec& machine,
                   const std::vector<KernelCostModel>& models, const RooflineOptions& opts = {});

void write_roofline_gnuplot(std::ostream& out, const MachineSpec& machine,
                            const std::string& csv_path);

}  // namespace cpapr
