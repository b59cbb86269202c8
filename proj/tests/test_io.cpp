#include <doctest.h>

#include <sstream>

#include "cspgeo/errors.hpp"
#include "cspgeo/io.hpp"

using namespace cspgeo;

namespace {

bool same(const Instance& a, const Instance& b) { return format_instance(a) == format_instance(b); }

}  // namespace

TEST_CASE("instance text round trip for every ensemble") {
  const Instance g = gen_uniform_graph(9, 12, 3, Seed{1});
  const Instance f = gen_uniform_cnf(9, 12, 3, Seed{1});
  const Instance h = gen_uniform_hypergraph(9, 12, 4, Seed{1});
  for (const auto* inst : {&g, &f, &h}) {
    const auto text = format_instance(*inst);
    CHECK(same(parse_instance(text), *inst));
  }
}

TEST_CASE("instance format details") {
  const Instance f = CnfInstance{3, 2, {{{0, false}, {2, true}}}};
  CHECK(format_instance(f) == "sat 3 1 2\n1 -3\n");
  const auto parsed = parse_instance("# comment\n\ncoloring 3 2 3\n2 1\n  # another\n0 1\n");
  const auto& g = std::get<GraphInstance>(parsed);
  REQUIRE(g.edges.size() == 2);
  CHECK(g.edges[0] == Edge{0, 1});
  CHECK(g.edges[1] == Edge{1, 2});
}

TEST_CASE("malformed instances report the line") {
  auto message = [](const std::string& text) {
    try {
      parse_instance(text);
    } catch (const ParameterError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message("coloring 3 1 3\n0 3\n").find("line 2") != std::string::npos);
  CHECK(message("sat 3 1 3\n1 2\n").find("line 2") != std::string::npos);
  CHECK(message("sat 3 1 3\n1 x 2\n").find("line 2") != std::string::npos);
  CHECK(message("bogus 3 1 3\n").find("line 1") != std::string::npos);
  CHECK(message("coloring 3 2 3\n0 1\n") != "no error");
  CHECK(message("coloring 3 2 3\n0 1\n1 0\n") != "no error");  // duplicate edge
  CHECK(message("") != "no error");
}

TEST_CASE("DIMACS export") {
  std::ostringstream out;
  write_dimacs(out, CnfInstance{4, 2, {{{0, true}, {3, false}}, {{1, false}, {2, false}}}});
  CHECK(out.str() == "p cnf 4 2\n-1 4 0\n2 3 0\n");
}

TEST_CASE("solutions, clusters and histograms as text") {
  const auto s = enumerate_solutions(GraphInstance{2, 3, {{0, 1}}});
  std::ostringstream sol;
  write_solutions(sol, s);
  CHECK(sol.str() == "01\n02\n10\n12\n20\n21\n");
  CHECK(format_assignment(Assignment({10, 3}, 12)) == "10 3");
  std::ostringstream cl;
  write_clusters_csv(cl, cluster_decomposition(s));
  CHECK(cl.str().rfind("solution_index,cluster_id\n0,0\n", 0) == 0);
  std::ostringstream hist;
  write_histogram_csv(hist, overlap_histogram(GraphInstance{2, 2, {}}, Assignment({0, 0}, 2), 0.0));
  CHECK(hist.str() == "x_numerator,x_denominator,count\n2,4,2\n4,4,2\n");
}

TEST_CASE("JSON exports map unbounded values to null") {
  const auto s = enumerate_solutions(GraphInstance{2, 2, {{0, 1}}});
  const auto st = classify_variables(s, Assignment({0, 1}, 2));
  const auto j = to_json(st);
  CHECK(j["rigid_distance"][0] == 2);
  const auto single = shatter_report(s, cluster_decomposition(s));
  CHECK(to_json(single)["region_count"] == 2);
  const auto one = enumerate_solutions(GraphInstance{2, 2, {}});
  CHECK(to_json(shatter_report(one, cluster_decomposition(one)))["min_barrier"].is_null());
  const auto iso = enumerate_solutions(GraphInstance{3, 2, {{0, 1}}});
  // vertex 2 is free, so it is loose at radius 1
  CHECK(to_json(classify_variables(iso, Assignment({0, 1, 0}, 2)))["loose_radius"][2] == 1);
  // x0 is forced true
  const CnfInstance forced{2, 2, {{{0, false}, {1, false}}, {{0, false}, {1, true}}}};
  const auto fs = enumerate_solutions(forced);
  CHECK(to_json(classify_variables(fs, Assignment({1, 0}, 2)))["rigid_distance"][0].is_null());
}
