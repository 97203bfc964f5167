#include <doctest.h>

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "g2q/bigint.hpp"
#include "g2q/monomial.hpp"

using namespace g2q;

namespace {

Monomial mono(const std::string& text) { return Monomial::parse(text); }

ACoeffs coeffs(std::initializer_list<std::pair<VarKey, long long>> init) {
  ACoeffs c;
  for (const auto& [k, v] : init) c.emplace(k, v);
  return c;
}

}  // namespace

TEST_CASE("BigInt small arithmetic and promotion") {
  BigInt a = 7;
  BigInt b = -3;
  CHECK((a + b).str() == "4");
  CHECK((a * b).str() == "-21");
  CHECK((a - b).str() == "10");
  CHECK(a.fits_int64());
  CHECK(a.as_int64() == 7);
  CHECK(BigInt(0).is_zero());
  CHECK(BigInt(-5).sign() == -1);

  // Force promotion past int64 and keep computing exactly.
  BigInt big = 1;
  for (int i = 0; i < 5; ++i) big *= BigInt(10'000'000'000LL);
  CHECK(big.str() == "1" + std::string(50, '0'));
  CHECK(!big.fits_int64());
  BigInt sum = big + big;
  CHECK(sum.str() == "2" + std::string(50, '0'));
  CHECK(sum > big);
  CHECK((big - big).is_zero());

  BigInt q;
  REQUIRE(sum.divide_exact(BigInt(2), q));
  CHECK(q == big);
  CHECK(!BigInt(7).divide_exact(BigInt(2), q));

  CHECK(BigInt("-123456789012345678901234567890").str() ==
        "-123456789012345678901234567890");
  CHECK_THROWS_AS(BigInt("12x"), std::invalid_argument);
}

TEST_CASE("variable and a_monomial forms") {
  CHECK(Monomial::variable(1, 0).str() == "1_0");
  CHECK(Monomial::variable(2, -4, -2).str() == "2_{-4}^-2");

  // A_{1,s} = 1_{s-3} 1_{s+3} 2_{s-2}^-1 2_s^-1 2_{s+2}^-1
  CHECK(Monomial::a_monomial(1, 0) ==
        mono("1_{-3} 1_3 2_{-2}^-1 2_0^-1 2_2^-1"));
  CHECK(Monomial::a_monomial(1, 3) == mono("1_0 1_6 2_1^-1 2_3^-1 2_5^-1"));
  // A_{2,s} = 2_{s-1} 2_{s+1} 1_s^-1
  CHECK(Monomial::a_monomial(2, 0) == mono("2_{-1} 2_1 1_0^-1"));
  CHECK(Monomial::a_monomial(2, 7) == mono("2_6 2_8 1_7^-1"));

  CHECK(Monomial::a_monomial(1, 5).weight() == std::pair{2LL, -3LL});
  CHECK(Monomial::a_monomial(2, 5).weight() == std::pair{-1LL, 2LL});
}

TEST_CASE("parse and print round-trips") {
  Monomial m = mono("1_{-7} 2_0");
  REQUIRE(m.entries().size() == 2);
  CHECK(m.exponent(1, -7) == 1);
  CHECK(m.exponent(2, 0) == 1);
  CHECK(m.exponent(2, 99) == 0);
  CHECK(m.str() == "1_{-7} 2_0");

  CHECK(mono("1_0^-1 1_0").is_identity());
  CHECK(mono("1").is_identity());
  CHECK(Monomial().str() == "1");
  CHECK(mono("2_3^2 2_3").exponent(2, 3) == 3);
  CHECK(mono("1_{12}^{-4}") == Monomial::variable(1, 12, -4));

  // Parsing the printed form is the identity on a spread of shapes.
  for (const char* text :
       {"1_0", "1_{-7} 2_0", "1_{-3}^2 2_{-2}^-1 2_4^3", "2_12^-1",
        "1_{-1}^-1 1_5 2_0^2"}) {
    Monomial x = mono(text);
    CHECK(Monomial::parse(x.str()) == x);
  }
}

TEST_CASE("parse errors are position-annotated") {
  CHECK_THROWS_WITH_AS(Monomial::parse("3_0"),
                       doctest::Contains("unknown node '3'"),
                       std::invalid_argument);
  CHECK_THROWS_AS(Monomial::parse("1_"), std::invalid_argument);
  CHECK_THROWS_AS(Monomial::parse("1_{3"), std::invalid_argument);
  CHECK_THROWS_AS(Monomial::parse("1_0^"), std::invalid_argument);
  CHECK_THROWS_AS(Monomial::parse(""), std::invalid_argument);
  CHECK_THROWS_AS(Monomial::parse("1_0 junk"), std::invalid_argument);
  try {
    Monomial::parse("1_0 3_0");
    FAIL("expected parse error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("position 4") != std::string::npos);
  }
}

TEST_CASE("from_sorted_entries validates") {
  std::vector<Monomial::Entry> good = {{{1, 0}, 1}, {{2, 3}, -2}};
  CHECK(Monomial::from_sorted_entries(good) == mono("1_0 2_3^-2"));
  std::vector<Monomial::Entry> unsorted = {{{2, 3}, 1}, {{1, 0}, 1}};
  CHECK_THROWS_AS(Monomial::from_sorted_entries(unsorted), std::logic_error);
  std::vector<Monomial::Entry> zero = {{{1, 0}, 0}};
  CHECK_THROWS_AS(Monomial::from_sorted_entries(zero), std::logic_error);
}

TEST_CASE("multiplication, inverse, pow, weight") {
  Monomial a = mono("1_0 2_3^-1");
  Monomial b = mono("1_0^-1 2_3 2_5");
  CHECK(a * b == mono("2_5"));
  CHECK(a * a.inverse() == Monomial());
  CHECK(a.pow(3) == mono("1_0^3 2_3^-3"));
  CHECK(a.pow(0) == Monomial());
  CHECK(a.pow(-2) == mono("1_0^-2 2_3^2"));

  CHECK(mono("1_0").weight() == std::pair{1LL, 0LL});
  CHECK(mono("2_0").weight() == std::pair{0LL, 1LL});
  CHECK((a * b).weight() == std::pair{0LL, 1LL});
}

TEST_CASE("dominance, antidominance, right-negativity") {
  CHECK(mono("1_0 2_4^2").is_dominant());
  CHECK(!mono("1_0 2_4^-1").is_dominant());
  CHECK(Monomial().is_dominant());
  CHECK(Monomial().is_antidominant());
  CHECK(mono("1_0^-2 2_4^-1").is_antidominant());

  // Right-negative: every exponent at the maximal occupied shift < 0.
  CHECK(mono("1_0 1_8^-1").is_right_negative());
  CHECK(!mono("1_0^-1 1_8").is_right_negative());
  CHECK(mono("1_4^-1 2_4^-1").is_right_negative());
  CHECK(!mono("1_4^-1 2_4").is_right_negative());
  CHECK_THROWS_WITH_AS(Monomial().is_right_negative(),
                       doctest::Contains("right-negativity"),
                       std::invalid_argument);

  // A^{-1} monomials are right-negative for both nodes.
  CHECK(Monomial::a_monomial(1, 2).inverse().is_right_negative());
  CHECK(Monomial::a_monomial(2, -5).inverse().is_right_negative());
}

TEST_CASE("shift and iota") {
  Monomial a = mono("1_{-1} 2_4^-2");
  CHECK(a.shifted(6) == mono("1_5 2_10^-2"));
  CHECK(a.shifted(6).shifted(-6) == a);
  // iota: (i, s, e) -> (i, 12 - s, -e)
  CHECK(mono("1_0").iota() == mono("1_12^-1"));
  CHECK(mono("2_{-7}").iota() == mono("2_19^-1"));
  CHECK(a.iota().iota() == a);
  Monomial b = mono("1_3 2_0");
  CHECK((a * b).iota() == a.iota() * b.iota());
}

TEST_CASE("monomial order is total and multiplicative") {
  Monomial a = mono("1_0");
  Monomial b = mono("1_0 2_3^-1");
  Monomial c = mono("2_3");
  CHECK(Monomial::compare(a, a) == 0);
  CHECK((Monomial::compare(a, b) > 0) != (Monomial::compare(b, a) > 0));
  // Missing exponents read as zero: 1_0 2_3^-1 < 1_0 < 1_0 2_3.
  CHECK(Monomial::compare(b, a) < 0);
  CHECK(Monomial::compare(a, a * c) < 0);
  // Multiplicativity on a fixed sample.
  std::vector<Monomial> sample = {a, b, c, mono("2_{-2}^2 1_5^-1"),
                                  mono("1_{-3}^-2"), Monomial()};
  for (const auto& x : sample) {
    for (const auto& y : sample) {
      for (const auto& z : sample) {
        int before = Monomial::compare(x, y);
        int after = Monomial::compare(x * z, y * z);
        CHECK((before < 0) == (after < 0));
        CHECK((before == 0) == (after == 0));
      }
    }
  }
}

TEST_CASE("product_of_A and factorization over the A-lattice") {
  ACoeffs c = coeffs({{{1, 0}, 1}});
  CHECK(product_of_A(c) == Monomial::a_monomial(1, 0));

  // Round-trip through a mixed product.
  ACoeffs mixed = coeffs({{{1, 3}, 2}, {{2, 0}, -1}, {{2, 6}, 3}});
  Monomial prod = product_of_A(mixed);
  auto back = factor_over_A_integral(prod);
  REQUIRE(back.has_value());
  CHECK(*back == mixed);

  // Non-lattice element has no factorization.
  CHECK(!factor_over_A_integral(mono("1_0")).has_value());
  CHECK(!factor_over_A_integral(mono("2_1")).has_value());
  // The identity factors trivially.
  auto trivial = factor_over_A_integral(Monomial());
  REQUIRE(trivial.has_value());
  CHECK(trivial->empty());

  // factor_over_A additionally demands nonnegativity.
  CHECK(factor_over_A(Monomial::a_monomial(1, 0)).has_value());
  CHECK(!factor_over_A(Monomial::a_monomial(1, 0).inverse()).has_value());
  ACoeffs pos = coeffs({{{1, 0}, 1}, {{2, 3}, 2}});
  auto pos_back = factor_over_A(product_of_A(pos));
  REQUIRE(pos_back.has_value());
  CHECK(*pos_back == pos);
}

TEST_CASE("leq partial order examples") {
  Monomial head = mono("1_0");
  Monomial lower = head * Monomial::a_monomial(1, 3).inverse();
  CHECK(leq(lower, head));
  CHECK(!leq(head, lower));
  CHECK(leq(head, head));

  // Heads of distinct modules in the same weight-translate need not be
  // comparable: 1_0 1_6 vs 1_0 2_7.
  CHECK(!leq(mono("1_0 1_6"), mono("1_0 2_7")));
  CHECK(!leq(mono("1_0 2_7"), mono("1_0 1_6")));
}

// The fifteen monomials of the fundamental node-1 character, in descent
// order from the head, each tagged with its exact A-ladder from the head.
// This freezes both the character combinatorics and the lattice solver.
TEST_CASE("fundamental character c-vector regression") {
  const std::vector<std::pair<std::string, ACoeffs>> table = {
      {"1_0", {}},
      {"2_1 2_3 2_5 1_6^-1", coeffs({{{1, 3}, 1}})},
      {"2_1 2_3 2_7^-1", coeffs({{{1, 3}, 1}, {{2, 6}, 1}})},
      {"2_1 2_5^-1 2_7^-1 1_4",
       coeffs({{{1, 3}, 1}, {{2, 6}, 1}, {{2, 4}, 1}})},
      {"2_3^-1 2_5^-1 2_7^-1 1_2 1_4",
       coeffs({{{1, 3}, 1}, {{2, 6}, 1}, {{2, 4}, 1}, {{2, 2}, 1}})},
      {"2_1 2_9 1_10^-1",
       coeffs({{{1, 3}, 1}, {{2, 6}, 1}, {{2, 4}, 1}, {{1, 7}, 1}})},
      {"1_4 1_8^-1",
       coeffs({{{1, 3}, 1}, {{2, 6}, 1}, {{2, 4}, 1}, {{2, 2}, 1},
               {{1, 5}, 1}})},
      {"2_3^-1 2_9 1_2 1_10^-1",
       coeffs({{{1, 3}, 1}, {{2, 6}, 1}, {{2, 4}, 1}, {{2, 2}, 1},
               {{1, 7}, 1}})},
      {"2_5 2_7 2_9 1_8^-1 1_10^-1",
       coeffs({{{1, 3}, 1}, {{2, 6}, 1}, {{2, 4}, 1}, {{2, 2}, 1},
               {{1, 5}, 1}, {{1, 7}, 1}})},
      {"2_1 2_11^-1",
       coeffs({{{1, 3}, 1}, {{2, 6}, 1}, {{2, 4}, 1}, {{1, 7}, 1},
               {{2, 10}, 1}})},
      {"2_3^-1 2_11^-1 1_2",
       coeffs({{{1, 3}, 1}, {{2, 6}, 1}, {{2, 4}, 1}, {{2, 2}, 1},
               {{1, 7}, 1}, {{2, 10}, 1}})},
      {"2_5 2_7 2_11^-1 1_8^-1",
       coeffs({{{1, 3}, 1}, {{2, 6}, 1}, {{2, 4}, 1}, {{2, 2}, 1},
               {{1, 5}, 1}, {{1, 7}, 1}, {{2, 10}, 1}})},
      {"2_5 2_9^-1 2_11^-1",
       coeffs({{{1, 3}, 1}, {{2, 6}, 1}, {{2, 4}, 1}, {{2, 2}, 1},
               {{1, 5}, 1}, {{1, 7}, 1}, {{2, 10}, 1}, {{2, 8}, 1}})},
      {"2_7^-1 2_9^-1 2_11^-1 1_6",
       coeffs({{{1, 3}, 1}, {{2, 6}, 2}, {{2, 4}, 1}, {{2, 2}, 1},
               {{1, 5}, 1}, {{1, 7}, 1}, {{2, 10}, 1}, {{2, 8}, 1}})},
      {"1_12^-1",
       coeffs({{{1, 3}, 1}, {{2, 6}, 2}, {{2, 4}, 1}, {{2, 2}, 1},
               {{1, 5}, 1}, {{1, 7}, 1}, {{2, 10}, 1}, {{2, 8}, 1},
               {{1, 9}, 1}})},
  };
  const Monomial head = mono("1_0");
  for (const auto& [text, expect] : table) {
    CAPTURE(text);
    Monomial m = mono(text);
    auto got = factor_over_A_integral(head * m.inverse());
    REQUIRE(got.has_value());
    CHECK(*got == expect);
    // And the multiplicative reconstruction agrees.
    CHECK(head * product_of_A(expect).inverse() == m);
  }
}

// Adjacent terms of the fundamental node-2 character differ by single
// A-steps; its descent ladder stays inside the {0,1} coefficient cone.
TEST_CASE("short-node character single-step chain") {
  const std::vector<std::string> chain = {
      "2_0",
      "2_2^-1 1_1",          // A_{2,1}
      "2_4 2_6 1_7^-1",      // then A_{1,4}
      "2_4 2_8^-1",          // then A_{2,7}
      "2_6^-1 2_8^-1 1_5",   // then A_{2,5}
      "2_10 1_11^-1",        // then A_{1,8}
      "2_12^-1",             // then A_{2,11}
  };
  const std::vector<VarKey> steps = {{2, 1}, {1, 4}, {2, 7},
                                     {2, 5}, {1, 8}, {2, 11}};
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    Monomial from = mono(chain[i]);
    Monomial to = mono(chain[i + 1]);
    auto ratio = factor_over_A_integral(from * to.inverse());
    REQUIRE(ratio.has_value());
    ACoeffs expect;
    expect.emplace(steps[i], 1);
    CHECK(*ratio == expect);
  }
}

TEST_CASE("hash agreement on equal monomials") {
  Monomial a = mono("1_{-3}^2 2_4^-1");
  Monomial b = mono("2_4^-1 1_{-3} 1_{-3}");
  CHECK(a == b);
  CHECK(a.hash() == b.hash());
  CHECK(MonomialHash{}(a) == MonomialHash{}(b));
}
