#include <doctest.h>

#include <regex>

#include <mpsenc/benchmarks.hpp>
#include <mpsenc/plot.hpp>

using namespace mpsenc;

namespace {

int count(const std::string& s, const std::string& needle) {
  int n = 0;
  for (std::size_t p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
  return n;
}

double luminance(const std::string& hex) {
  const int r = std::stoi(hex.substr(1, 2), nullptr, 16), g = std::stoi(hex.substr(3, 2), nullptr, 16),
            b = std::stoi(hex.substr(5, 2), nullptr, 16);
  return 0.2126 * r + 0.7152 * g + 0.0722 * b;
}

}  // namespace

TEST_CASE("layer-count formulas") {
  CHECK(omega_lower_bound(1) == 0.0);
  CHECK(omega_lower_bound(2) == 1.0);
  CHECK(omega_lower_bound(3) == 6.0);
  CHECK(equivalent_layer_count(2) == 1.0);
  CHECK(equivalent_layer_count(4) == 6.0);
  CHECK(equivalent_layer_count(8) == doctest::Approx(27.0).epsilon(1e-14));
  for (int k = 2; k <= 6; ++k) CHECK(equivalent_layer_count(1 << (k - 1)) == doctest::Approx(omega_lower_bound(k)).epsilon(1e-14));
  CHECK_THROWS_AS(omega_lower_bound(0), Error);
  CHECK_THROWS_AS(equivalent_layer_count(6), Error);
  CHECK_THROWS_AS(equivalent_layer_count(1), Error);
}

TEST_CASE("direct_truncation_baseline") {
  CHECK(direct_truncation_baseline(product_state({1, 0, 1, 1, 0}), 2).infidelity < 1e-14);
  Vec ghz = Vec::Zero(1 << 6);
  ghz(0) = ghz((1 << 6) - 1) = 1 / std::sqrt(2.0);
  CHECK(direct_truncation_baseline(from_statevector(ghz, 64), 2).infidelity < 1e-14);
  const Mps t = random_mps(10, 16, 4);
  CHECK(direct_truncation_baseline(t, 16).infidelity < 1e-12);
  const auto p2 = direct_truncation_baseline(t, 2), p4 = direct_truncation_baseline(t, 4);
  CHECK(p2.equivalent_layers == 1.0);
  CHECK(p2.infidelity > p4.infidelity);
  CHECK_THROWS_AS(direct_truncation_baseline(t, 1), Error);
}

TEST_CASE("ResultTable csv round trip") {
  ResultTable t;
  t.comments = {"schema v1"};
  t.columns = {"a", "b"};
  t.rows = {{"1", "x"}, {"2", ""}};
  const auto back = ResultTable::from_csv(t.to_csv());
  CHECK(back.columns == t.columns);
  CHECK(back.rows == t.rows);
  CHECK(back.comments == t.comments);
  CHECK_THROWS_AS(ResultTable::from_csv("# only a comment\n"), Error);
  CHECK_THROWS_AS(ResultTable::from_csv("a,b\n1\n"), Error);
}

TEST_CASE("parse_grid_spec validation") {
  const auto s = parse_grid_spec(R"({"experiment":"encode","n_qubits":[6,8],"costs":["global","local"],"shots":[null,1000],"seeds":[1,2]})");
  CHECK(s.n_qubits == std::vector<int>{6, 8});
  CHECK(s.shots.size() == 2);
  CHECK_FALSE(s.shots[0].has_value());
  CHECK(*s.shots[1] == 1000);
  CHECK(parse_grid_spec(R"({"n_qubits":6})").n_qubits == std::vector<int>{6});
  CHECK_THROWS_AS(parse_grid_spec(R"({"n_qubits":[6],"bogus":1})"), Error);
  CHECK_THROWS_AS(parse_grid_spec(R"({"layers":[2]})"), Error);
  CHECK_THROWS_AS(parse_grid_spec(R"({"n_qubits":[40]})"), Error);
  CHECK_THROWS_AS(parse_grid_spec(R"({"n_qubits":[6],"costs":["medium"]})"), Error);
  CHECK_THROWS_AS(parse_grid_spec("not json"), Error);
}

TEST_CASE("run_grid: empty, seeds, ordering and determinism") {
  GridSpec empty;
  const auto e = run_grid(empty);
  CHECK(e.rows.empty());
  CHECK(e.to_csv().rfind("# mpsenc-grid v1", 0) == 0);
  CHECK(e.column("infidelity") >= 0);

  GridSpec s = parse_grid_spec(R"({"n_qubits":[6],"layers":[2],"sweeps":[3],"inits":["random"],"seeds":[5,6]})");
  const auto r = run_grid(s);
  REQUIRE(r.rows.size() == 2);
  const int seed_col = r.column("seed"), inf_col = r.column("infidelity");
  for (std::size_t c = 0; c < r.columns.size(); ++c)
    if (static_cast<int>(c) != seed_col && static_cast<int>(c) != inf_col && r.columns[c] != "local_infidelity")
      CHECK(r.rows[0][c] == r.rows[1][c]);
  CHECK(r.rows[0][seed_col] == "5");

  GridSpec big = parse_grid_spec(
      R"({"n_qubits":[4,6],"layers":[1,2],"methods":["layer","optimize"],"costs":["global","local"],"sweeps":2,"seeds":[1,2,3]})");
  big.threads = 1;
  const std::string serial = run_grid(big).to_csv();
  big.threads = 4;
  CHECK(run_grid(big).to_csv() == serial);
  const auto table = ResultTable::from_csv(serial);
  CHECK(table.rows.size() == 2 * 2 * 3 * 3);
  for (std::size_t i = 1; i < table.rows.size(); ++i) CHECK(std::stoi(table.rows[i][0]) >= std::stoi(table.rows[i - 1][0]));

  const auto base = run_grid(parse_grid_spec(R"({"experiment":"baseline","n_qubits":8,"target":{"chi":8},"chi0":[2,4,8]})"));
  REQUIRE(base.rows.size() == 3);
  CHECK(std::stod(base.rows[2][base.column("infidelity")]) < 1e-12);
  const auto grad = run_grid(parse_grid_spec(R"({"experiment":"gradient","n_qubits":[6],"inits":["random"],"costs":["global","local"]})"));
  CHECK(grad.rows.size() == 2);
  CHECK(std::stod(grad.rows[0][grad.column("grad_rms")]) > 0);
}

TEST_CASE("emit_plot lines and heatmap") {
  ResultTable t;
  t.columns = {"n", "value", "cost"};
  t.rows = {{"6", "1e-1", "global"}, {"8", "1e-2", "global"}, {"10", "1e-4", "global"}};
  PlotOptions o;
  o.x = "n";
  o.y = "value";
  std::string svg = emit_plot(t, o);
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(count(svg, "<polyline") == 1);
  CHECK(count(svg, "class=\"xlabel\"") == 1);
  CHECK(count(svg, "class=\"ylabel\"") == 1);
  CHECK(svg.find("value (log)") != std::string::npos);

  t.rows.push_back({"6", "0.5", "local"});
  t.rows.push_back({"8", "0.4", "local"});
  o.series = "cost";
  svg = emit_plot(t, o);
  CHECK(count(svg, "<polyline") == 2);
  CHECK(count(svg, "class=\"legend-entry\"") == 2);

  ResultTable h;
  h.columns = {"n", "shots", "infidelity"};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) h.rows.push_back({std::to_string(6 + 2 * i), std::to_string(1000 * (j + 1)), std::to_string(0.1 * (1 + i + 3 * j))});
  PlotOptions ho;
  ho.kind = PlotKind::heatmap;
  ho.x = "n";
  ho.y = "shots";
  ho.value = "infidelity";
  svg = emit_plot(h, ho);
  CHECK(count(svg, "class=\"cell\"") == 9);
  // darker cells carry larger values
  std::regex cell(R"re(class="cell"[^>]*fill="(#[0-9a-f]{6})"><title>([^<]+)</title>)re");
  std::vector<std::pair<double, double>> vl;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), cell); it != std::sregex_iterator(); ++it)
    vl.emplace_back(std::stod((*it)[2]), luminance((*it)[1]));
  REQUIRE(vl.size() == 9);
  std::sort(vl.begin(), vl.end());
  for (std::size_t i = 1; i < vl.size(); ++i) CHECK(vl[i].second < vl[i - 1].second);

  o.y = "missing";
  CHECK_THROWS_AS(emit_plot(t, o), Error);
  ho.value = "";
  CHECK_THROWS_AS(emit_plot(h, ho), Error);
}
