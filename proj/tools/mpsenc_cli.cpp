// Command-line front end: target generation, encoding, baselines, grids, plots.
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mpsenc/benchmarks.hpp"
#include "mpsenc/io.hpp"
#include "mpsenc/ising.hpp"
#include "mpsenc/layer_encoder.hpp"
#include "mpsenc/optimizer.hpp"
#include "mpsenc/plot.hpp"

using namespace mpsenc;

namespace {

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-")
    std::cout << text;
  else
    write_text_file(path, text);
}

int fail(const std::string& code, const std::string& message, int status) {
  std::cerr << nlohmann::json{{"error", code}, {"message", message}}.dump() << "\n";
  return status;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Encode matrix product states into staircase circuits"};
  app.require_subcommand(1);

  // gen-target
  auto* gen = app.add_subcommand("gen-target", "Write a target MPS file");
  std::string family, gen_in, gen_out = "-";
  int gen_n = 8, gen_chi = 16;
  double gen_hx = 0.6;
  std::uint64_t gen_seed = 1;
  gen->add_option("family", family, "random-mps | ising | from-file")
      ->required()
      ->check(CLI::IsMember({"random-mps", "ising", "from-file"}));
  gen->add_option("-n,--qubits", gen_n, "Number of qubits")->check(CLI::PositiveNumber);
  gen->add_option("--chi", gen_chi, "Bond dimension")->check(CLI::PositiveNumber);
  gen->add_option("--hx", gen_hx, "Transverse field ratio h_x/J_z (ising)");
  gen->add_option("--seed", gen_seed, "Seed (random-mps)");
  gen->add_option("-i,--input", gen_in, "Source MPS file (from-file)");
  gen->add_option("-o,--output", gen_out, "Output path, '-' for stdout");

  // encode
  auto* enc = app.add_subcommand("encode", "Encode a target into a staircase circuit");
  std::string enc_target, method = "optimize", cost = "global", init = "layer_by_layer_full", update = "element_wise";
  std::string circuit_out, trace_out = "-";
  int layers = 2, sweeps = 20, inner_iters = 20, chi_work = kDefaultWorkingBond;
  double rel_tol = 0.0, step = 0.1;
  std::optional<long long> shots;
  std::string shot_scale = "absolute";
  std::uint64_t seed = 1;
  bool timing = false;
  enc->add_option("-t,--target", enc_target, "Target MPS file")->required();
  enc->add_option("--method", method, "layer | optimize")->check(CLI::IsMember({"layer", "optimize"}));
  enc->add_option("-L,--layers", layers, "Number of layers")->check(CLI::PositiveNumber);
  enc->add_option("--cost", cost, "global | local");
  enc->add_option("--sweeps", sweeps, "Maximum number of sweeps")->check(CLI::PositiveNumber);
  enc->add_option("--rel-tol", rel_tol, "Stop when the cost improves by less than this fraction (0: run all sweeps)");
  enc->add_option("--init", init, "random | layer_by_layer_1 | layer_by_layer_full");
  enc->add_option("--update", update, "element_wise | descent");
  enc->add_option("--step-size", step, "Step size for descent");
  enc->add_option("--inner-iters", inner_iters, "Inner iterations of the local update");
  enc->add_option("--shots", shots, "Shots per environment coefficient (default: exact)");
  enc->add_option("--shot-scale", shot_scale, "absolute | relative")->check(CLI::IsMember({"absolute", "relative"}));
  enc->add_option("--seed", seed, "Seed");
  enc->add_option("--chi-work", chi_work, "Working bond dimension of the layer encoder");
  enc->add_option("--circuit", circuit_out, "Write the final circuit here");
  enc->add_option("--trace", trace_out, "Trace CSV path, '-' for stdout");
  enc->add_flag("--timing", timing, "Record wall-clock seconds (output no longer reproducible)");

  // baseline
  auto* base = app.add_subcommand("baseline", "Direct truncation baseline");
  std::string base_target, base_out = "-";
  std::vector<int> chi0{2, 4};
  base->add_option("-t,--target", base_target, "Target MPS file")->required();
  base->add_option("--chi0", chi0, "Truncated bond dimensions")->delimiter(',');
  base->add_option("-o,--output", base_out, "CSV path, '-' for stdout");

  // grid
  auto* grid = app.add_subcommand("grid", "Run an experiment grid from a JSON spec");
  std::string spec_path, grid_out = "-";
  int threads = -1;
  grid->add_option("--spec", spec_path, "Grid spec JSON file")->required();
  grid->add_option("-o,--output", grid_out, "CSV path, '-' for stdout");
  grid->add_option("--threads", threads, "Worker threads (overrides the spec)");

  // plot
  auto* plot = app.add_subcommand("plot", "Render a result CSV as SVG");
  std::string plot_in, plot_out = "-", kind = "lines";
  PlotOptions po;
  plot->add_option("-i,--input", plot_in, "Result CSV")->required();
  plot->add_option("--kind", kind, "lines | heatmap")->check(CLI::IsMember({"lines", "heatmap"}));
  plot->add_option("--x", po.x, "x column")->required();
  plot->add_option("--y", po.y, "y column")->required();
  plot->add_option("--series", po.series, "Series column (lines)");
  plot->add_option("--value", po.value, "Colour column (heatmap)");
  plot->add_option("--title", po.title, "Title");
  plot->add_option("--log-x", po.log_x, "Force a log x axis (true/false)");
  plot->add_option("--log-y", po.log_y, "Force a log y axis (true/false)");
  plot->add_option("-o,--output", plot_out, "SVG path, '-' for stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), 2);
  }

  try {
    if (*gen) {
      Mps target;
      if (family == "random-mps")
        target = random_mps(gen_n, gen_chi, gen_seed);
      else if (family == "ising")
        target = ising_ground_state(gen_n, gen_hx, gen_chi);
      else {
        if (gen_in.empty()) throw Error(ErrorCode::invalid_argument, "from-file needs --input");
        target = mps_from_json(read_text_file(gen_in));
      }
      emit(gen_out, mps_to_json(target));
    } else if (*enc) {
      const Mps target = mps_from_json(read_text_file(enc_target));
      StaircaseCircuit circuit;
      std::string trace;
      if (method == "layer") {
        const LayerEncoding e = layer_by_layer_encode(target, layers, chi_work);
        circuit = e.circuit;
        trace = "layers,infidelity\n";
        for (std::size_t l = 0; l < e.infidelity.size(); ++l) trace += std::to_string(l + 1) + "," + fmt(e.infidelity[l]) + "\n";
      } else {
        OptimizerConfig cfg;
        cfg.cost = parse_cost(cost);
        cfg.init = parse_init(init);
        cfg.update = parse_update(update);
        cfg.max_sweeps = sweeps;
        cfg.rel_tol = rel_tol;
        cfg.step_size = step;
        cfg.inner_bilinear_iters = inner_iters;
        cfg.seed = seed;
        cfg.shots = shots;
        cfg.shot_scale = shot_scale == "relative" ? ShotScale::relative : ShotScale::absolute;
        cfg.chi_work = chi_work;
        cfg.record_timing = timing;
        const OptimizationResult r = optimize(target, layers, cfg);
        circuit = r.circuit;
        trace = r.trace.to_csv();
      }
      if (!circuit_out.empty()) write_text_file(circuit_out, circuit_to_json(circuit));
      emit(trace_out, trace);
    } else if (*base) {
      const Mps target = mps_from_json(read_text_file(base_target));
      std::string csv = "chi0,equivalent_layers,infidelity\n";
      for (int c : chi0) {
        const BaselinePoint p = direct_truncation_baseline(target, c);
        csv += std::to_string(p.chi0) + "," + fmt(p.equivalent_layers) + "," + fmt(p.infidelity) + "\n";
      }
      emit(base_out, csv);
    } else if (*grid) {
      GridSpec spec = parse_grid_spec(read_text_file(spec_path));
      if (threads >= 0) spec.threads = threads;
      emit(grid_out, run_grid(spec).to_csv());
    } else if (*plot) {
      po.kind = parse_plot_kind(kind);
      emit(plot_out, emit_plot(ResultTable::from_csv(read_text_file(plot_in)), po));
    }
  } catch (const Error& e) {
    return fail(to_string(e.code()), e.what(), 1);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 1);
  }
  return 0;
}
