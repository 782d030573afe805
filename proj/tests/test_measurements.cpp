#include <random>

#include "doctest.h"
#include "efmcg/errors.hpp"
#include "efmcg/measurements.hpp"
#include "efmcg/synthetic.hpp"
#include "fixtures.hpp"

using namespace efmcg;

TEST_SUITE("measurements") {

TEST_CASE("toy C stacks into Q with one block") {
  const Network net = fixtures::toy_a();
  const MeasurementSet ms = parse_measurements(fixtures::kToyC, net);
  CHECK(ms.metabolites.size() == 3);
  CHECK(ms.repetitions.size() == 1);
  const StackedSystem s = stack(ms, net);
  CHECK(s.q.isApprox(Eigen::Vector3d(-1, 0.6, 0.4)));
  REQUIRE(s.blocks.size() == 1);
  CHECK(s.blocks[0] == std::vector<std::size_t>{0, 1, 2});
  const Eigen::MatrixXd ax = partition(net).external;
  CHECK(s.apply(ax).isApprox(ax));
}

TEST_CASE("two identical repetitions give two identical blocks") {
  const Network net = fixtures::toy_a();
  const MeasurementSet ms = parse_measurements("met,r1,r2\nA,-1,-1\nB,0.6,0.6\nC,0.4,0.4\n", net);
  const StackedSystem s = stack(ms, net);
  CHECK(s.q.size() == 6);
  CHECK(s.q.head(3).isApprox(s.q.tail(3)));
  const Eigen::MatrixXd d = s.apply(partition(net).external);
  CHECK(d.topRows(3).isApprox(d.bottomRows(3)));
}

TEST_CASE("headerless single row") {
  const Network net = fixtures::toy_a();
  const MeasurementSet ms = parse_measurements("A  -1.0\n", net);
  CHECK(ms.metabolites == std::vector<std::string>{"A"});
  CHECK(ms.repetitions.size() == 1);
  const StackedSystem s = stack(ms, net);
  CHECK(s.q.size() == 1);
  CHECK(s.rows[0].external_row == 0);
}

TEST_CASE("missing cells drop rows") {
  const Network net = fixtures::toy_a();
  const MeasurementSet ms = parse_measurements("m\tr1\tr2\nA\t-1\tNa\nB\tNA\t0.5\nC\t0.4\t0.2\n", net);
  CHECK(ms.missing_count() == 2);
  CHECK_FALSE(ms.value("A", "r2").has_value());
  CHECK(*ms.value("B", "r2") == doctest::Approx(0.5));
  const StackedSystem s = stack(ms, net);
  CHECK(s.q.size() == 4);
  CHECK(s.blocks[0] == std::vector<std::size_t>{0, 2});
  CHECK(s.blocks[1] == std::vector<std::size_t>{1, 2});
}

TEST_CASE("unmeasured externals are simply absent") {
  const Network net = fixtures::toy_a();
  const StackedSystem s = stack(parse_measurements("m\tr\nA\t-1\nC\t0.4\n", net), net);
  CHECK(s.q.size() == 2);
  CHECK(s.rows[1].external_row == 2);
}

TEST_CASE("input errors") {
  const Network net = fixtures::toy_a();
  CHECK_THROWS_AS(parse_measurements("", net), InputError);
  CHECK_THROWS_AS(parse_measurements("# nothing\n", net), InputError);
  CHECK_THROWS_AS(parse_measurements("m\tr\nM\t1\n", net), ParseError);    // internal metabolite
  CHECK_THROWS_AS(parse_measurements("m\tr\nZ\t1\n", net), ParseError);    // unknown
  CHECK_THROWS_AS(parse_measurements("m\tr\nA\tx\n", net), ParseError);
  CHECK_THROWS_AS(parse_measurements("m\tr\nA\t1\nA\t2\n", net), ParseError);
  CHECK_THROWS_AS(parse_measurements("m\tr\ts\nA\t1\n", net), ParseError);
  CHECK_THROWS_AS(parse_measurements("m\tr\tr\nA\t1\t2\n", net), ParseError);
  CHECK_THROWS_AS(parse_measurements("m\tr\nA\tNa\n", net), InputError);   // nothing measured
  try {
    parse_measurements("m\tr\nA\t1\nB\tfoo\n", net);
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("stack rejects metabolites the network does not know") {
  const Network net = fixtures::toy_a();
  MeasurementSet ms;
  ms.metabolites = {"A", "Z"};
  ms.repetitions = {"r"};
  ms.values = {{1.0}, {2.0}};
  CHECK_THROWS_AS(stack(ms, net), InputError);
}

TEST_CASE("round trip through the canonical writer") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const Network net = synthetic::random_network(rng);
    const MeasurementSet ms = synthetic::random_measurements(rng, net, 1, 4, 0.2);
    const MeasurementSet back = parse_measurements(render_measurements(ms), net);
    CHECK(back.metabolites == ms.metabolites);
    CHECK(back.repetitions == ms.repetitions);
    CHECK(back.values == ms.values);
  }
}

TEST_CASE("bundled CHO external-flux table") {
  const Network net = read_network_file(fixtures::data_dir() + "/cho_demo.net");
  const MeasurementSet ms = read_measurement_file(fixtures::data_dir() + "/table1.tsv", net);
  CHECK(ms.metabolites.size() == 24);
  CHECK(ms.repetitions.size() == 6);
  CHECK(ms.missing_count() == 4);
  for (const char* rep : {"q_ext_8", "q_ext_9", "q_ext_10", "q_ext_11"}) CHECK_FALSE(ms.value("His", rep).has_value());
  CHECK(*ms.value("His", "q_ext_7") == doctest::Approx(-0.064));
  CHECK(*ms.value("Glc", "q_ext_6") == -4.454);
  CHECK(*ms.value("Lac", "q_ext_10") == 7.088);
  CHECK(stack(ms, net).q.size() == 140);
}

}  // TEST_SUITE
