#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mpsenc/layer_encoder.hpp"
#include "mpsenc/optimizer.hpp"

namespace mpsenc {

/// Lower bound on staircase layers needed to emulate a k-qubit gate:
/// 4^k/9 - k/3 - 1/9. Requires k >= 1.
double omega_lower_bound(int k);

/// Layer count matched to an MPS of bond dimension chi0 (a power of two >= 2):
/// (4/9) chi0^2 - (1/3) log2(chi0) - 4/9.
double equivalent_layer_count(int chi0);

struct BaselinePoint {
  int chi0 = 0;
  double equivalent_layers = 0.0;
  double infidelity = 0.0;
};

/// Infidelity of the target truncated to bond dimension chi0.
BaselinePoint direct_truncation_baseline(const Mps& target, int chi0);

/// Column-labelled table of string cells; numbers are written with %.17g so
/// CSV output is bit-reproducible.
struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  /// Leading "# ..." lines emitted before the header.
  std::vector<std::string> comments;

  int column(const std::string& name) const;  ///< -1 when absent
  std::string to_csv() const;
  static ResultTable from_csv(const std::string& text);
};

inline constexpr const char* kGridSchema = "mpsenc-grid v1";
/// Grid cells are limited to this many qubits.
inline constexpr int kGridMaxQubits = 20;

enum class Experiment { encode, gradient, baseline };
const char* to_string(Experiment e);
Experiment parse_experiment(const std::string& s);

enum class Method { layer, optimize };
const char* to_string(Method m);
Method parse_method(const std::string& s);

struct TargetSpec {
  std::string family = "random-mps";  ///< random-mps | ising
  int chi = 64;
  double hx_over_jz = 0.6;
};

/// Cartesian grid over every list; one row per (cell, seed).
struct GridSpec {
  Experiment experiment = Experiment::encode;
  TargetSpec target;
  std::vector<int> n_qubits;
  std::vector<int> layers{5};
  std::vector<Method> methods{Method::optimize};
  std::vector<CostKind> costs{CostKind::global};
  std::vector<InitKind> inits{InitKind::layer_by_layer_full};
  std::vector<int> sweeps{20};
  /// nullopt means exact environments.
  std::vector<std::optional<long long>> shots{std::nullopt};
  std::vector<int> chi0{2, 4};
  std::vector<std::uint64_t> seeds{1};
  int threads = 0;  ///< 0 picks the hardware concurrency
  int chi_work = kDefaultWorkingBond;

  void validate() const;
};

/// Parses a JSON grid description; unknown keys are rejected.
GridSpec parse_grid_spec(const std::string& json_text);

/// Runs every cell on a thread pool. Rows are ordered by cell then seed and
/// do not depend on scheduling.
ResultTable run_grid(const GridSpec& spec);

/// Target for a grid row; identical for every cell sharing (seed, N).
Mps grid_target(const TargetSpec& target, int n_qubits, std::uint64_t seed);

}  // namespace mpsenc
