#include "mpsenc/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mpsenc {

using nlohmann::json;

namespace {

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw Error(ErrorCode::parse_error, "expected [re, im] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(ErrorCode::parse_error, std::string("missing field '") + key + "'");
  return j.at(key);
}

int int_field(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number_integer()) throw Error(ErrorCode::parse_error, std::string("field '") + key + "' must be an integer");
  return v.get<int>();
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::parse_error, e.what());
  }
}

}  // namespace

std::string mps_to_json(const Mps& mps) {
  json sites = json::array();
  for (const SiteTensor& t : mps.sites) {
    json a = json::array();
    for (int l = 0; l < t.left_dim(); ++l) {
      json p = json::array();
      for (int s = 0; s < 2; ++s) {
        json r = json::array();
        for (int b = 0; b < t.right_dim(); ++b) r.push_back(complex_json(t(l, s, b)));
        p.push_back(std::move(r));
      }
      a.push_back(std::move(p));
    }
    sites.push_back(std::move(a));
  }
  json doc = {{"format", "mpsenc.mps"},
              {"version", 1},
              {"n_sites", mps.n_sites()},
              {"bond_dims", mps.bond_dims()},
              {"sites", std::move(sites)}};
  return doc.dump() + "\n";
}

Mps mps_from_json(const std::string& text) {
  const json doc = parse(text);
  const int n = int_field(doc, "n_sites");
  if (n < 2) throw Error(ErrorCode::invalid_argument, "n_sites must be >= 2");
  const json& sites = field(doc, "sites");
  if (!sites.is_array() || static_cast<int>(sites.size()) != n)
    throw Error(ErrorCode::size_mismatch, "sites array length differs from n_sites");
  Mps mps;
  for (int i = 0; i < n; ++i) {
    const json& a = sites[i];
    if (!a.is_array() || a.empty() || !a[0].is_array() || a[0].size() != 2 || !a[0][0].is_array() || a[0][0].empty())
      throw Error(ErrorCode::parse_error, "site " + std::to_string(i) + " is not a [left][2][right] array");
    const int left = static_cast<int>(a.size()), right = static_cast<int>(a[0][0].size());
    SiteTensor t(left, right);
    for (int l = 0; l < left; ++l) {
      if (!a[l].is_array() || a[l].size() != 2) throw Error(ErrorCode::size_mismatch, "physical dimension must be 2");
      for (int s = 0; s < 2; ++s) {
        if (!a[l][s].is_array() || static_cast<int>(a[l][s].size()) != right)
          throw Error(ErrorCode::size_mismatch, "ragged site tensor at site " + std::to_string(i));
        for (int b = 0; b < right; ++b) t(l, s, b) = complex_from(a[l][s][b]);
      }
    }
    mps.sites.push_back(std::move(t));
  }
  if (doc.contains("bond_dims")) {
    if (doc.at("bond_dims").get<std::vector<int>>() != mps.bond_dims())
      throw Error(ErrorCode::size_mismatch, "bond_dims disagree with site tensors");
  }
  mps.validate();
  if (std::abs(norm(mps) - 1.0) > 1e-8) throw Error(ErrorCode::invalid_argument, "MPS is not normalized");
  return mps;
}

std::string circuit_to_json(const StaircaseCircuit& circuit) {
  json gates = json::array();
  for (const GateRef r : circuit.sweep_order()) {
    const Mat4& g = circuit.gate(r);
    json rows = json::array();
    for (int i = 0; i < 4; ++i) {
      json row = json::array();
      for (int j = 0; j < 4; ++j) row.push_back(complex_json(g(i, j)));
      rows.push_back(std::move(row));
    }
    gates.push_back({{"layer", r.layer}, {"site", r.site}, {"matrix", std::move(rows)}});
  }
  json doc = {{"format", "mpsenc.circuit"},
              {"version", 1},
              {"n_qubits", circuit.n_qubits()},
              {"n_layers", circuit.n_layers()},
              {"gates", std::move(gates)}};
  return doc.dump() + "\n";
}

StaircaseCircuit circuit_from_json(const std::string& text) {
  const json doc = parse(text);
  const int n = int_field(doc, "n_qubits");
  const int l = int_field(doc, "n_layers");
  StaircaseCircuit c(n, l);
  const json& gates = field(doc, "gates");
  if (!gates.is_array() || static_cast<int>(gates.size()) != c.n_gates())
    throw Error(ErrorCode::size_mismatch, "expected " + std::to_string(c.n_gates()) + " gates");
  for (const json& g : gates) {
    GateRef ref{int_field(g, "layer"), int_field(g, "site")};
    c.check_valid(ref);
    const json& rows = field(g, "matrix");
    if (!rows.is_array() || rows.size() != 4) throw Error(ErrorCode::size_mismatch, "gate matrix must be 4x4");
    Mat4 m;
    for (int i = 0; i < 4; ++i) {
      if (!rows[i].is_array() || rows[i].size() != 4) throw Error(ErrorCode::size_mismatch, "gate matrix must be 4x4");
      for (int j = 0; j < 4; ++j) m(i, j) = complex_from(rows[i][j]);
    }
    c.set_gate(ref, m);
  }
  c.validate();
  return c;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io_error, "cannot write '" + path + "'");
  out << text;
  if (!out) throw Error(ErrorCode::io_error, "write failed for '" + path + "'");
}

}  // namespace mpsenc
