#include "mpsenc/benchmarks.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "mpsenc/engine.hpp"
#include "mpsenc/ising.hpp"
#include "mpsenc/layer_encoder.hpp"
#include "mpsenc/linalg.hpp"

namespace mpsenc {

using nlohmann::json;

double omega_lower_bound(int k) {
  if (k < 1) throw Error(ErrorCode::invalid_argument, "omega_lower_bound needs k >= 1");
  return (std::pow(4.0, k) - 3.0 * k - 1.0) / 9.0;
}

double equivalent_layer_count(int chi0) {
  if (chi0 < 2 || (chi0 & (chi0 - 1)) != 0)
    throw Error(ErrorCode::invalid_argument, "chi0 must be a power of two >= 2");
  const double c = chi0;
  return (4.0 * c * c - 3.0 * std::log2(c) - 4.0) / 9.0;
}

BaselinePoint direct_truncation_baseline(const Mps& target, int chi0) {
  if (chi0 < 2) throw Error(ErrorCode::invalid_argument, "chi0 must be >= 2");
  BaselinePoint p;
  p.chi0 = chi0;
  p.equivalent_layers = (chi0 & (chi0 - 1)) == 0 ? equivalent_layer_count(chi0) : std::nan("");
  const Mps cut = truncate(target, chi0).mps;
  p.infidelity = std::max(0.0, 1.0 - std::norm(inner(normalized(target), cut)));
  return p;
}

// ---- table ----

int ResultTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<int>(i);
  return -1;
}

std::string ResultTable::to_csv() const {
  std::string out;
  for (const auto& c : comments) out += "# " + c + "\n";
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(columns);
  for (const auto& r : rows) line(r);
  return out;
}

ResultTable ResultTable::from_csv(const std::string& text) {
  ResultTable t;
  std::istringstream in(text);
  std::string raw;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(s);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!s.empty() && s.back() == ',') cells.emplace_back();
    return cells;
  };
  bool header = false;
  while (std::getline(in, raw)) {
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.empty()) continue;
    if (raw[0] == '#') {
      t.comments.push_back(raw.size() > 2 ? raw.substr(2) : "");
      continue;
    }
    if (!header) {
      t.columns = split(raw);
      header = true;
      continue;
    }
    auto cells = split(raw);
    if (cells.size() != t.columns.size())
      throw Error(ErrorCode::parse_error, "csv row has " + std::to_string(cells.size()) + " cells, header has " +
                                              std::to_string(t.columns.size()));
    t.rows.push_back(std::move(cells));
  }
  if (!header) throw Error(ErrorCode::parse_error, "csv has no header line");
  return t;
}

// ---- enums ----

const char* to_string(Experiment e) {
  switch (e) {
    case Experiment::encode: return "encode";
    case Experiment::gradient: return "gradient";
    case Experiment::baseline: return "baseline";
  }
  return "?";
}

Experiment parse_experiment(const std::string& s) {
  if (s == "encode") return Experiment::encode;
  if (s == "gradient") return Experiment::gradient;
  if (s == "baseline") return Experiment::baseline;
  throw Error(ErrorCode::invalid_argument, "unknown experiment '" + s + "'");
}

const char* to_string(Method m) { return m == Method::layer ? "layer" : "optimize"; }

Method parse_method(const std::string& s) {
  if (s == "layer") return Method::layer;
  if (s == "optimize") return Method::optimize;
  throw Error(ErrorCode::invalid_argument, "unknown method '" + s + "'");
}

// ---- spec ----

void GridSpec::validate() const {
  if (target.family != "random-mps" && target.family != "ising")
    throw Error(ErrorCode::invalid_argument, "unknown target family '" + target.family + "'");
  if (target.chi < 1) throw Error(ErrorCode::invalid_argument, "target chi must be >= 1");
  for (int n : n_qubits)
    if (n < 2 || n > kGridMaxQubits)
      throw Error(ErrorCode::invalid_argument, "grid n_qubits must lie in [2, " + std::to_string(kGridMaxQubits) + "]");
  for (int l : layers)
    if (l < 1) throw Error(ErrorCode::invalid_argument, "layers must be >= 1");
  for (int s : sweeps)
    if (s < 1) throw Error(ErrorCode::invalid_argument, "sweeps must be >= 1");
  for (const auto& m : shots)
    if (m && *m < 1) throw Error(ErrorCode::invalid_argument, "shots must be >= 1");
  for (int c : chi0)
    if (c < 2) throw Error(ErrorCode::invalid_argument, "chi0 must be >= 2");
  if (threads < 0) throw Error(ErrorCode::invalid_argument, "threads must be >= 0");
  if (chi_work < 2) throw Error(ErrorCode::invalid_argument, "chi_work must be >= 2");
}

namespace {

// Accepts a scalar as a one-element list.
template <class T, class F>
std::vector<T> list_of(const json& j, F convert) {
  std::vector<T> out;
  if (j.is_array())
    for (const auto& v : j) out.push_back(convert(v));
  else
    out.push_back(convert(j));
  return out;
}

int as_int(const json& v) {
  if (!v.is_number_integer()) throw Error(ErrorCode::parse_error, "expected an integer, got " + v.dump());
  return v.get<int>();
}

std::string as_string(const json& v) {
  if (!v.is_string()) throw Error(ErrorCode::parse_error, "expected a string, got " + v.dump());
  return v.get<std::string>();
}

}  // namespace

GridSpec parse_grid_spec(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("grid spec: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::parse_error, "grid spec must be a JSON object");
  static const std::set<std::string> known{"experiment", "target", "n_qubits", "layers", "methods", "costs",
                                           "inits", "sweeps", "shots", "chi0", "seeds", "threads", "chi_work"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw Error(ErrorCode::parse_error, "grid spec: unknown key '" + key + "'");

  GridSpec s;
  try {
    if (j.contains("experiment")) s.experiment = parse_experiment(as_string(j["experiment"]));
    if (j.contains("target")) {
      const json& t = j["target"];
      if (!t.is_object()) throw Error(ErrorCode::parse_error, "grid spec: target must be an object");
      for (const auto& [key, value] : t.items())
        if (key != "family" && key != "chi" && key != "hx_over_jz")
          throw Error(ErrorCode::parse_error, "grid spec: unknown target key '" + key + "'");
      if (t.contains("family")) s.target.family = as_string(t["family"]);
      if (t.contains("chi")) s.target.chi = as_int(t["chi"]);
      if (t.contains("hx_over_jz")) s.target.hx_over_jz = t["hx_over_jz"].get<double>();
    }
    if (!j.contains("n_qubits")) throw Error(ErrorCode::parse_error, "grid spec: n_qubits is required");
    s.n_qubits = list_of<int>(j["n_qubits"], as_int);
    if (j.contains("layers")) s.layers = list_of<int>(j["layers"], as_int);
    if (j.contains("methods"))
      s.methods = list_of<Method>(j["methods"], [](const json& v) { return parse_method(as_string(v)); });
    if (j.contains("costs"))
      s.costs = list_of<CostKind>(j["costs"], [](const json& v) { return parse_cost(as_string(v)); });
    if (j.contains("inits"))
      s.inits = list_of<InitKind>(j["inits"], [](const json& v) { return parse_init(as_string(v)); });
    if (j.contains("sweeps")) s.sweeps = list_of<int>(j["sweeps"], as_int);
    if (j.contains("shots"))
      s.shots = list_of<std::optional<long long>>(j["shots"], [](const json& v) -> std::optional<long long> {
        if (v.is_null()) return std::nullopt;
        if (!v.is_number()) throw Error(ErrorCode::parse_error, "shots entries must be numbers or null");
        return static_cast<long long>(v.get<double>());
      });
    if (j.contains("chi0")) s.chi0 = list_of<int>(j["chi0"], as_int);
    if (j.contains("seeds"))
      s.seeds = list_of<std::uint64_t>(j["seeds"], [](const json& v) {
        if (!v.is_number_unsigned()) throw Error(ErrorCode::parse_error, "seeds must be non-negative integers");
        return v.get<std::uint64_t>();
      });
    if (j.contains("threads")) s.threads = as_int(j["threads"]);
    if (j.contains("chi_work")) s.chi_work = as_int(j["chi_work"]);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("grid spec: ") + e.what());
  }
  s.validate();
  return s;
}

// ---- grid ----

namespace {

constexpr std::uint64_t kTargetStream = 0x7a726774;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string shots_text(const std::optional<long long>& m) { return m ? std::to_string(*m) : "exact"; }

struct Cell {
  int n = 0, layers = 0, sweeps = 0, chi0 = 0;
  Method method = Method::optimize;
  CostKind cost = CostKind::global;
  InitKind init = InitKind::random;
  std::optional<long long> shots;
};

std::vector<Cell> enumerate_cells(const GridSpec& s) {
  std::vector<Cell> cells;
  for (int n : s.n_qubits) {
    Cell c;
    c.n = n;
    switch (s.experiment) {
      case Experiment::baseline:
        for (int chi0 : s.chi0) {
          c.chi0 = chi0;
          cells.push_back(c);
        }
        break;
      case Experiment::gradient:
        for (int l : s.layers)
          for (InitKind init : s.inits)
            for (CostKind cost : s.costs) {
              c.layers = l, c.init = init, c.cost = cost;
              cells.push_back(c);
            }
        break;
      case Experiment::encode:
        for (int l : s.layers)
          for (Method m : s.methods) {
            c.layers = l, c.method = m;
            if (m == Method::layer) {
              cells.push_back(c);
              continue;
            }
            for (InitKind init : s.inits)
              for (CostKind cost : s.costs)
                for (int sw : s.sweeps)
                  for (const auto& shots : s.shots) {
                    c.init = init, c.cost = cost, c.sweeps = sw, c.shots = shots;
                    cells.push_back(c);
                  }
          }
        break;
    }
  }
  return cells;
}

std::vector<std::string> columns_for(Experiment e) {
  std::vector<std::string> base{"cell", "seed", "family", "n_qubits", "chi"};
  std::vector<std::string> extra;
  switch (e) {
    case Experiment::encode:
      extra = {"layers", "method", "init", "cost", "sweeps", "shots", "infidelity", "local_infidelity"};
      break;
    case Experiment::gradient:
      extra = {"layers", "init", "cost", "grad_rms"};
      break;
    case Experiment::baseline:
      extra = {"chi0", "equivalent_layers", "infidelity"};
      break;
  }
  base.insert(base.end(), extra.begin(), extra.end());
  return base;
}

std::vector<std::string> run_cell(const GridSpec& s, const Cell& c, std::size_t index, std::uint64_t seed) {
  const Mps target = grid_target(s.target, c.n, seed);
  const std::uint64_t cell_seed = split_seed(seed, index);
  std::vector<std::string> row{std::to_string(index), std::to_string(seed), s.target.family, std::to_string(c.n),
                               std::to_string(s.target.chi)};
  auto add = [&](std::initializer_list<std::string> cells) { row.insert(row.end(), cells); };
  switch (s.experiment) {
    case Experiment::baseline: {
      const BaselinePoint p = direct_truncation_baseline(target, c.chi0);
      add({std::to_string(c.chi0), num(p.equivalent_layers), num(p.infidelity)});
      break;
    }
    case Experiment::gradient: {
      const StaircaseCircuit circuit =
          initial_circuit(target, c.layers, c.init, split_seed(cell_seed, 1), s.chi_work, {});
      add({std::to_string(c.layers), to_string(c.init), to_string(c.cost),
           num(rms_norm(riemannian_gradients(circuit, target, c.cost)))});
      break;
    }
    case Experiment::encode: {
      if (c.method == Method::layer) {
        const LayerEncoding enc = layer_by_layer_encode(target, c.layers, s.chi_work);
        add({std::to_string(c.layers), "layer", "-", "-", "0", "exact", num(enc.infidelity.back()),
             num(1.0 - mean_local_fidelity(enc.circuit, target))});
        break;
      }
      OptimizerConfig cfg;
      cfg.cost = c.cost;
      cfg.init = c.init;
      cfg.max_sweeps = c.sweeps;
      cfg.rel_tol = 0;
      cfg.seed = cell_seed;
      cfg.shots = c.shots;
      cfg.chi_work = s.chi_work;
      cfg.record_gradient = false;
      const OptimizationResult r = optimize(target, c.layers, cfg);
      const SweepRecord& last = r.trace.records.back();
      add({std::to_string(c.layers), "optimize", to_string(c.init), to_string(c.cost), std::to_string(c.sweeps),
           shots_text(c.shots), num(last.infidelity), num(last.local_infidelity)});
      break;
    }
  }
  return row;
}

}  // namespace

Mps grid_target(const TargetSpec& target, int n_qubits, std::uint64_t seed) {
  if (target.family == "ising") return ising_ground_state(n_qubits, target.hx_over_jz, target.chi);
  if (target.family == "random-mps")
    return random_mps(n_qubits, target.chi, split_seed(split_seed(seed, kTargetStream), n_qubits));
  throw Error(ErrorCode::invalid_argument, "unknown target family '" + target.family + "'");
}

ResultTable run_grid(const GridSpec& spec) {
  spec.validate();
  ResultTable table;
  table.comments = {std::string(kGridSchema) + " experiment=" + to_string(spec.experiment),
                    "desk-scale: n_qubits <= " + std::to_string(kGridMaxQubits)};
  table.columns = columns_for(spec.experiment);

  const std::vector<Cell> cells = enumerate_cells(spec);
  const std::size_t n_tasks = cells.size() * spec.seeds.size();
  table.rows.resize(n_tasks);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= n_tasks) return;
      const std::size_t cell = t / spec.seeds.size();
      try {
        table.rows[t] = run_cell(spec, cells[cell], cell, spec.seeds[t % spec.seeds.size()]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n_tasks);
      }
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t n_threads =
      std::min<std::size_t>(spec.threads > 0 ? static_cast<std::size_t>(spec.threads) : hw, std::max<std::size_t>(1, n_tasks));
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < n_threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return table;
}

}  // namespace mpsenc
