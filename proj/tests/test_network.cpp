#include <random>

#include "doctest.h"
#include "efmcg/errors.hpp"
#include "efmcg/network.hpp"
#include "efmcg/synthetic.hpp"
#include "fixtures.hpp"

using namespace efmcg;

TEST_SUITE("network") {

TEST_CASE("toy A parses into the expected partition") {
  const Network net = fixtures::toy_a();
  CHECK(net.reaction_count() == 3);
  CHECK(net.internal_count() == 1);
  CHECK(net.external_count() == 3);
  const Partition p = partition(net);
  Eigen::MatrixXd ai(1, 3);
  ai << 1, -1, -1;
  CHECK(p.internal.isApprox(ai));
  Eigen::MatrixXd ax(3, 3);
  ax << -1, 0, 0, 0, 1, 0, 0, 0, 1;
  CHECK(p.external.isApprox(ax));
  CHECK(net.external_name(0) == "A");
  CHECK(net.external_name(2) == "C");
}

TEST_CASE("toy B keeps the reversible flag") {
  const Network net = fixtures::toy_b();
  CHECK_FALSE(net.reactions()[0].reversible);
  CHECK(net.reactions()[2].reversible);
  CHECK(net.irreversible_reactions() == std::vector<std::size_t>{0, 1});
}

TEST_CASE("coefficients: decimals, fractions, implicit 1, merged duplicates") {
  const Network net = parse_network(
      "external: S P\n"
      "R1 : 2 S -> 1/3 M + 0.5 M\n"
      "R2 : M -> 1.2e1 P  # comment\n");
  const auto& ai = net.internal_stoichiometry();
  CHECK(ai(0, 0) == Rational(5, 6));
  CHECK(net.external_stoichiometry()(1, 1) == Rational(12));
  CHECK(net.external_stoichiometry()(0, 0) == Rational(-2));
}

TEST_CASE("metabolite names may contain '+' characters") {
  const Network net = parse_network("external: Gln NH4+ X\nR1 : Gln -> M + NH4+\nR2 : M -> X\n");
  CHECK(net.external_row("NH4+").has_value());
  CHECK(net.external_stoichiometry()(*net.external_row("NH4+"), 0) == 1);
}

TEST_CASE("parse errors carry the line number") {
  auto line_of = [](const char* text) -> std::size_t {
    try {
      parse_network(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of("external: A\nR1 : A M\n") == 2);
  CHECK(line_of("external: A B\nR1 : A -> M\nR1 : M -> B\n") == 3);
  CHECK(line_of("external: A B\n\nR1 : A -> 0 M\n") == 3);
  CHECK(line_of("external: A B\nR1 : A -> -2 M\n") == 2);
  CHECK(line_of("external: A B\nR1 : A + -> M\n") == 2);
}

TEST_CASE("strict declarations reject an undeclared metabolite") {
  try {
    parse_network("external: A B\ninternal: M\nR1 : A -> M\nR2 : M -> X\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
    CHECK(std::string(e.what()).find("undeclared metabolite X") != std::string::npos);
  }
}

TEST_CASE("a reaction whose terms cancel is rejected") {
  CHECK_THROWS_AS(parse_network("external: A B\nR0 : A -> A\nR1 : A -> M\nR2 : M -> B\n"), ParseError);
}

TEST_CASE("structural invariants") {
  CHECK_THROWS_AS(parse_network("external: A B\nR1 : A -> B\n"), InputError);  // no internal
  CHECK_THROWS_AS(parse_network("R1 : A -> M\n"), InputError);                  // no external
  CHECK_THROWS_AS(parse_network("external: A\nexternal: A\nR1 : A -> M\n"), ParseError);
}

TEST_CASE("extension: toy A unchanged, toy B gets a negated backward column") {
  const Network a = fixtures::toy_a();
  const ExtendedNetwork ea(a);
  CHECK(ea.size() == 3);
  CHECK(ea.internal().isApprox(partition(a).internal));

  const Network b = fixtures::toy_b();
  const ExtendedNetwork eb(b);
  REQUIRE(eb.size() == 4);
  CHECK(eb.columns()[3].reaction == 2);
  CHECK(eb.columns()[3].direction == Direction::Backward);
  CHECK(eb.internal().col(3).isApprox(-eb.internal().col(2)));
  CHECK(eb.external().col(3).isApprox(-eb.external().col(2)));
  CHECK(eb.partner(2) == std::optional<std::size_t>(3));
  CHECK_FALSE(eb.partner(0).has_value());
}

TEST_CASE("folding toy B rays") {
  const Network b = fixtures::toy_b();
  const ExtendedNetwork eb(b);

  auto r1 = fold_ray(eb, Eigen::Vector4d(0, 1, 0, 1));
  REQUIRE(std::holds_alternative<FluxMode>(r1));
  CHECK(std::get<FluxMode>(r1).folded.isApprox(Eigen::Vector3d(0, 1, -1)));

  auto r2 = fold_ray(eb, Eigen::Vector4d(0, 0, 1, 1));
  REQUIRE(std::holds_alternative<Cycle>(r2));
  CHECK(std::get<Cycle>(r2).reactions == std::vector<std::size_t>{2});

  auto r3 = fold_ray(eb, Eigen::Vector4d(1, 1, 0, 0));
  REQUIRE(std::holds_alternative<FluxMode>(r3));
  CHECK(std::get<FluxMode>(r3).folded.isApprox(Eigen::Vector3d(1, 1, 0)));

  CHECK_THROWS_AS(fold_ray(eb, Eigen::Vector4d(1, 0, 0, 0)), FeasibilityError);
  CHECK_THROWS_AS(fold_ray(eb, Eigen::Vector4d(-1, -1, 0, 0)), FeasibilityError);
}

TEST_CASE("exact folding normalizes to unit 1-norm") {
  const Network b = fixtures::toy_b();
  const ExtendedNetwork eb(b);
  auto r = fold_ray_exact(eb, {Rational(2), Rational(2), Rational(0), Rational(0)});
  const auto& m = std::get<FluxMode>(r);
  CHECK(m.extended.isApprox(Eigen::Vector4d(0.5, 0.5, 0, 0)));
  CHECK((*m.exact_extended)[0] == Rational(1, 2));
  CHECK(std::holds_alternative<Cycle>(fold_ray_exact(eb, {Rational(0), Rational(0), Rational(3), Rational(3)})));
}

TEST_CASE("macroscopic rendering of a toy A mode") {
  const Network a = fixtures::toy_a();
  const ExtendedNetwork ea(a);
  const auto mode = std::get<FluxMode>(fold_ray(ea, Eigen::Vector3d(0.5, 0.5, 0)));
  CHECK(mode.macro.isApprox(Eigen::Vector3d(-0.5, 0.5, 0)));
  const MacroReaction m = render_macroscopic(ea, mode);
  CHECK(m.text == "1 A ⇒ 1 B");
  CHECK(m.factor == doctest::Approx(2.0));
  // Rendered coefficients times the rendered weight recover the fluxes.
  const double w = 1.6;
  CHECK((m.coefficients * (w / m.factor)).isApprox(mode.macro * w));
}

TEST_CASE("fractions and decimals in rendered coefficients") {
  const Network net = parse_network("external: S P Q\nR1 : 3 S -> M\nR2 : M -> P + 2 Q\n");
  const ExtendedNetwork ext(net);
  const auto mode = std::get<FluxMode>(fold_ray(ext, Eigen::Vector2d(0.5, 0.5)));
  CHECK(render_macroscopic(ext, mode).text == "1 S ⇒ 1/3 P + 2/3 Q");

  const Network net2 = parse_network("external: S P\nR1 : 4 S -> M\nR2 : M -> P\n");
  const ExtendedNetwork ext2(net2);
  const auto mode2 = std::get<FluxMode>(fold_ray(ext2, Eigen::Vector2d(0.5, 0.5)));
  CHECK(render_macroscopic(ext2, mode2).text == "1 S ⇒ 0.25 P");
  CHECK(format_coefficient(0.028217) == "0.028217");
}

TEST_CASE("internal cycles render a marker") {
  const Network net = parse_network("external: A B\nR1 : A -> M\nR2 : M -> N\nR3 : N -> M\nR4 : N -> B\n");
  const ExtendedNetwork ext(net);
  const auto mode = std::get<FluxMode>(fold_ray(ext, Eigen::Vector4d(0, 0.5, 0.5, 0)));
  CHECK(mode.internal_only());
  const MacroReaction m = render_macroscopic(ext, mode);
  CHECK(m.internal_only);
  CHECK(m.text == kInternalCycleMarker);
}

TEST_CASE("random networks respect the generator spec") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Network net = synthetic::random_network(rng);
    const ExtendedNetwork ext(net);
    CHECK(net.internal_count() >= 4);
    CHECK(net.internal_count() <= 8);
    CHECK(ext.size() >= 8);
    CHECK(ext.size() <= 12);
    const Partition p = partition(net);
    CHECK(p.internal.rows() == static_cast<Eigen::Index>(net.internal_count()));
    CHECK(p.external.cols() == static_cast<Eigen::Index>(net.reaction_count()));
  }
}

}  // TEST_SUITE
