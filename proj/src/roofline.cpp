#include "cpapr/roofline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cpapr/error.hpp"

#ifndef CPAPR_DEFAULT_MACHINE_DIR
#define CPAPR_DEFAULT_MACHINE_DIR "data/machines"
#endif

namespace cpapr {

void validate(const MachineSpec& m) {
  if (!(m.clock_ghz > 0 && m.cores_per_socket > 0 && m.ops_per_cycle > 0 && m.sockets > 0 &&
        m.bandwidth_gbs > 0))
    throw ContractError("machine spec '" + m.name + "' must have positive fields");
}

MachineSpec parse_machine_spec(const std::string& json_text) {
  MachineSpec m;
  try {
    const auto j = nlohmann::json::parse(json_text);
    m.name = j.at("name").get<std::string>();
    m.clock_ghz = j.at("clock_ghz").get<double>();
    m.cores_per_socket = j.at("cores_per_socket").get<double>();
    m.ops_per_cycle = j.at("ops_per_cycle").get<double>();
    m.sockets = j.at("sockets").get<double>();
    m.bandwidth_gbs = j.at("bandwidth_gbs").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad machine spec: ") + e.what());
  }
  try {
    validate(m);
  } catch (const ContractError& e) {
    throw InputError(e.what());
  }
  return m;
}

MachineSpec load_machine_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open machine spec '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_machine_spec(ss.str());
}

std::string default_machine_dir() {
  if (const char* env = std::getenv("CPAPR_MACHINE_DIR"); env && *env) return env;
  return CPAPR_DEFAULT_MACHINE_DIR;
}

MachineSpec resolve_machine_spec(const std::string& name_or_path) {
  namespace fs = std::filesystem;
  if (fs::is_regular_file(name_or_path)) return load_machine_spec(name_or_path);
  fs::path candidate = fs::path(default_machine_dir()) / name_or_path;
  if (candidate.extension() != ".json") candidate += ".json";
  if (fs::is_regular_file(candidate)) return load_machine_spec(candidate.string());
  throw InputError("machine spec '" + name_or_path + "' not found (looked in " +
                   default_machine_dir() + ")");
}

std::string KernelCostModel::label() const {
  if (variant == CostVariant::BaseGpuStyle) return "base_R" + std::to_string(rank);
  return "chunked_R" + std::to_string(rank) + "_V" + std::to_string(chunk);
}

WorkTraffic work_and_traffic(const KernelCostModel& model, std::int64_t nnz) {
  if (model.rank < 1) throw ContractError("cost model rank must be at least 1");
  if (nnz < 0) throw ContractError("nnz must be nonnegative");
  const Rational R(model.rank);
  if (model.variant == CostVariant::BaseGpuStyle)
    return {nnz * (4 * R + 2), nnz * (5 * R + 2)};
  if (model.chunk < 1) throw ContractError("cost model V must be at least 1");
  const Rational r_over_v(model.rank, model.chunk);
  return {nnz * (4 * R + r_over_v + 3), nnz * (6 * R + 2 * r_over_v + 3)};
}

Intensity operational_intensity(const KernelCostModel& model, std::int64_t nnz) {
  if (nnz <= 0) throw ContractError("operational intensity needs nnz > 0");
  if (model.word_bytes < 1) throw ContractError("word size must be positive");
  const WorkTraffic wq = work_and_traffic(model, nnz);
  const Rational exact = wq.flops / (wq.words * model.word_bytes);
  const double quoted = model.variant == CostVariant::BaseGpuStyle ? 0.125 : 0.27;
  return {exact, to_double(exact), quoted};
}

double peak_flops(const MachineSpec& m) {
  return m.clock_ghz * m.cores_per_socket * m.ops_per_cycle * m.sockets;
}

double attainable(const MachineSpec& m, double intensity) {
  return std::min(peak_flops(m), m.bandwidth_gbs * intensity);
}

double balance_point(const MachineSpec& m) { return peak_flops(m) / m.bandwidth_gbs; }

void emit_roofline(std::ostream& out, const MachineSpec& machine,
                   const std::vector<KernelCostModel>& models, const RooflineOptions& opts) {
  validate(machine);
  if (opts.samples_per_octave < 1 || opts.max_exp < opts.min_exp)
    throw ContractError("bad roofline sampling range");
  char buf[256];
  out << "series,label,I,P\n";
  const int steps = (opts.max_exp - opts.min_exp) * opts.samples_per_octave;
  for (int k = 0; k <= steps; ++k) {
    const double I = std::ldexp(1.0, opts.min_exp) *
                     std::exp2(static_cast<double>(k) / opts.samples_per_octave);
    std::snprintf(buf, sizeof(buf), "roofline,%s,%.10g,%.10g\n", machine.name.c_str(), I,
                  attainable(machine, I));
    out << buf;
  }
  const double balance = balance_point(machine);
  std::snprintf(buf, sizeof(buf), "balance,%s,%.10g,%.10g\n", machine.name.c_str(), balance,
                peak_flops(machine));
  out << buf;
  for (const auto& model : models) {
    const Intensity I = operational_intensity(model, 1);
    std::snprintf(buf, sizeof(buf), "marker,%s,%.10g,%.10g\n", model.label().c_str(), I.value,
                  attainable(machine, I.value));
    out << buf;
    if (opts.quoted_markers) {
      std::snprintf(buf, sizeof(buf), "quoted,%s,%.10g,%.10g\n", model.label().c_str(), I.quoted,
                    attainable(machine, I.quoted));
      out << buf;
    }
  }
}

void write_roofline_gnuplot(std::ostream& out, const MachineSpec& machine,
                            const std::string& csv_path) {
  out << "set datafile separator ','\n"
         "set logscale xy 2\n"
         "set xlabel 'Operational intensity (FLOP/byte)'\n"
         "set ylabel 'Attainable GFLOP/s'\n"
         "set title 'Roofline: "
      << machine.name
      << "'\n"
         "plot '< grep ^roofline, "
      << csv_path
      << "' using 3:4 with lines title 'bound', \\\n"
         "     '< grep ^marker, "
      << csv_path << "' using 3:4:2 with labels point pt 7 offset 1,1 title 'kernels'\n";
}

}  // namespace cpapr
