#include <algorithm>
#include <set>

#include "doctest.h"
#include "mshjb/errors.hpp"
#include "mshjb/io.hpp"
#include "mshjb/model.hpp"
#include "test_util.hpp"

using namespace mshjb;
using namespace mshjb::testutil;

namespace {

// Independent oracle: enumerate N^m vectors summing to M by nested loops
// over the full box, then sort lexicographically.
std::vector<std::vector<int>> brute_force_states(int m, long M) {
  std::vector<std::vector<int>> out;
  std::vector<int> v(static_cast<std::size_t>(m), 0);
  while (true) {
    long s = 0;
    for (int c : v) s += c;
    if (s == M) out.push_back(v);
    int i = m - 1;
    while (i >= 0 && v[static_cast<std::size_t>(i)] == M) {
      v[static_cast<std::size_t>(i)] = 0;
      --i;
    }
    if (i < 0) break;
    v[static_cast<std::size_t>(i)]++;
  }
  std::sort(out.begin(), out.end());
  return out;
}

long binom(long n, long k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST_CASE("michaelis-menten builtin has the expected reaction classes") {
  auto net = mm_unit();
  REQUIRE(net.reactions.size() == 4);
  CHECK(net.reactions[0].cls == ReactionClass::slow_only);
  CHECK(net.reactions[1].cls == ReactionClass::coupled);
  CHECK(net.reactions[2].cls == ReactionClass::coupled);
  CHECK(net.reactions[3].cls == ReactionClass::coupled);
  CHECK(validate_network(net).empty());
}

TEST_CASE("classification is a partition and idempotent") {
  auto net = mm_unit();
  for (const auto& rx : net.reactions) {
    auto c1 = classify_reaction(rx.gamma_x, rx.gamma_y);
    auto c2 = classify_reaction(rx.gamma_x, rx.gamma_y);
    CHECK(c1 == rx.cls);
    CHECK(c1 == c2);
  }
  CHECK(classify_reaction(std::vector<int>{0}, std::vector<int>{1, -1}) ==
        ReactionClass::fast_only);
  CHECK(classify_reaction(std::vector<int>{1}, std::vector<int>{0, 0}) ==
        ReactionClass::slow_only);
}

TEST_CASE("fast state enumeration matches hand values") {
  auto fss = FastStateSpace::enumerate(2, 1);
  REQUIRE(fss.size() == 2);
  CHECK(fss.state(0) == std::vector<int>{0, 1});
  CHECK(fss.state(1) == std::vector<int>{1, 0});

  auto fss3 = FastStateSpace::enumerate(2, 3);
  REQUIRE(fss3.size() == 4);
  CHECK(fss3.state(0) == std::vector<int>{0, 3});
  CHECK(fss3.state(3) == std::vector<int>{3, 0});
}

TEST_CASE("fast state enumeration agrees with the brute-force oracle") {
  auto oracle = brute_force_states(3, 2);
  auto fss = FastStateSpace::enumerate(3, 2);
  REQUIRE(fss.size() == 6);
  REQUIRE(oracle.size() == 6);
  for (int i = 0; i < fss.size(); ++i)
    CHECK(fss.state(i) == oracle[static_cast<std::size_t>(i)]);
}

TEST_CASE("enumeration cardinality is binomial(M+m-1, m-1) exhaustively") {
  for (int m = 1; m <= 4; ++m)
    for (long M = 0; M <= 8; ++M) {
      auto fss = FastStateSpace::enumerate(m, M);
      CHECK(fss.size() == binom(M + m - 1, m - 1));
      auto oracle = brute_force_states(m, M);
      REQUIRE(static_cast<std::size_t>(fss.size()) == oracle.size());
      for (int i = 0; i < fss.size(); ++i) {
        CHECK(fss.state(i) == oracle[static_cast<std::size_t>(i)]);
        CHECK(fss.index_of(fss.state(i)) == i);
      }
    }
}

TEST_CASE("enumeration respects the capacity cap") {
  CHECK_THROWS_AS(FastStateSpace::enumerate(4, 200, 100000), CapacityError);
  CHECK_NOTHROW(FastStateSpace::enumerate(2, 1000, 100000));
}

TEST_CASE("conservation check") {
  SUBCASE("michaelis-menten passes") {
    CHECK(check_conservation(mm_unit()).pass);
  }
  SUBCASE("fast-only reaction summing to zero passes") {
    MultiScaleNetwork net;
    net.slow_dim = 1;
    net.fast_dim = 2;
    net.conservation = 1;
    net.reactions = {{{0}, {1, -1}, poly1(1.0, {0}, {0, 1}),
                      ReactionClass::fast_only}};
    CHECK(check_conservation(net).pass);
  }
  SUBCASE("coupled reaction with nonzero fast sum fails with the index") {
    MultiScaleNetwork net;
    net.slow_dim = 1;
    net.fast_dim = 2;
    net.conservation = 1;
    net.reactions = {{{1}, {1, 0}, poly1(1.0, {0}, {0, 0}),
                      ReactionClass::coupled}};
    auto rep = check_conservation(net);
    CHECK_FALSE(rep.pass);
    REQUIRE(rep.offending_reactions.size() == 1);
    CHECK(rep.offending_reactions[0] == 0);
  }
}

TEST_CASE("irreducibility at interior and boundary slow states") {
  auto net = mm_unit();
  auto fss = FastStateSpace::enumerate(2, 1);

  SUBCASE("interior x is strongly connected") {
    auto rep = check_irreducibility(net, std::vector<double>{1.0, 1.0}, fss);
    CHECK(rep.pass);
    CHECK(rep.components.size() == 1);
  }
  SUBCASE("x1 = 0 kills the binding edge") {
    auto rep = check_irreducibility(net, std::vector<double>{0.0, 1.0}, fss);
    CHECK_FALSE(rep.pass);
    CHECK(rep.components.size() == 2);
  }
  SUBCASE("no fast coupling at all means isolated states") {
    MultiScaleNetwork net2;
    net2.slow_dim = 1;
    net2.fast_dim = 2;
    net2.conservation = 1;
    net2.reactions = {{{1}, {0, 0}, poly1(1.0, {0}, {0, 0}),
                       ReactionClass::slow_only}};
    auto rep = check_irreducibility(net2, std::vector<double>{1.0}, fss);
    CHECK_FALSE(rep.pass);
    CHECK(rep.components.size() == 2);
  }
}

TEST_CASE("irreducibility is invariant under positive rate scaling") {
  auto fss = FastStateSpace::enumerate(2, 1);
  for (double scale : {0.01, 1.0, 250.0}) {
    auto net = builtin_michaelis_menten(scale, scale, scale, scale, 1);
    auto rep = check_irreducibility(net, std::vector<double>{0.7, 2.3}, fss);
    CHECK(rep.pass);
  }
}

TEST_CASE("product-form surrogate check") {
  SUBCASE("michaelis-menten binding vanishes on x1 = 0") {
    auto rep = check_product_form(mm_unit());
    CHECK(rep.pass);
    CHECK(rep.violations.empty());
    // every builtin MM rate is a single monomial
    for (bool s : rep.single_monomial) CHECK(s);
  }
  SUBCASE("consuming reaction with constant rate is flagged") {
    MultiScaleNetwork net;
    net.slow_dim = 2;
    net.fast_dim = 1;
    net.conservation = 0;
    net.reactions = {{{-1, 0}, {0}, poly1(1.0, {0, 0}, {0}),
                      ReactionClass::slow_only}};
    auto rep = check_product_form(net);
    CHECK_FALSE(rep.pass);
    REQUIRE(rep.violations.size() == 1);
    CHECK(rep.violations[0].reaction == 0);
    CHECK(rep.violations[0].slow_index == 0);
  }
  SUBCASE("producing reaction with constant rate passes") {
    MultiScaleNetwork net;
    net.slow_dim = 2;
    net.fast_dim = 1;
    net.conservation = 0;
    net.reactions = {{{1, 0}, {0}, poly1(1.0, {0, 0}, {0}),
                      ReactionClass::slow_only}};
    CHECK(check_product_form(net).pass);
  }
}

TEST_CASE("builtin michaelis-menten accepts zero inflow and larger M") {
  auto net0 = builtin_michaelis_menten(0.0, 1.0, 1.0, 1.0, 1);
  CHECK(validate_network(net0).empty());
  auto fss = FastStateSpace::enumerate(2, 3);
  CHECK(fss.size() == 4);  // compositions of 3 into 2 parts
}

TEST_CASE("parse_model rejects the spec error cases with reaction indices") {
  SUBCASE("zero jump") {
    std::string doc = R"({"slow_dim":1,"fast_dim":1,"conservation_M":0,
      "reactions":[{"gamma_x":[0],"gamma_y":[0],
                    "rate":{"monomials":[{"k":1.0,"x_exp":[0],"y_exp":[0]}]}}]})";
    try {
      parse_model(doc);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      REQUIRE(e.violations().size() == 1);
      CHECK(e.violations()[0].find("zero jump") != std::string::npos);
      CHECK(e.violations()[0].find("reaction 0") != std::string::npos);
    }
  }
  SUBCASE("conservation violated") {
    std::string doc = R"({"slow_dim":1,"fast_dim":2,"conservation_M":1,
      "reactions":[{"gamma_x":[1],"gamma_y":[1,0],
                    "rate":{"monomials":[{"k":1.0,"x_exp":[0],"y_exp":[0,0]}]}}]})";
    try {
      parse_model(doc);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.violations()[0].find("conservation violated") != std::string::npos);
    }
  }
  SUBCASE("negative coefficient") {
    std::string doc = R"({"slow_dim":1,"fast_dim":1,"conservation_M":0,
      "reactions":[{"gamma_x":[1],"gamma_y":[0],
                    "rate":{"monomials":[{"k":-2.0,"x_exp":[0],"y_exp":[0]}]}}]})";
    CHECK_THROWS_AS(parse_model(doc), ParseError);
  }
  SUBCASE("dimension mismatch") {
    std::string doc = R"({"slow_dim":2,"fast_dim":1,"conservation_M":0,
      "reactions":[{"gamma_x":[1],"gamma_y":[0],
                    "rate":{"monomials":[{"k":1.0,"x_exp":[0,0],"y_exp":[0]}]}}]})";
    try {
      parse_model(doc);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.what() != std::string());
      bool has_dim = false;
      for (const auto& v : e.violations())
        if (v.find("dimension mismatch") != std::string::npos) has_dim = true;
      CHECK(has_dim);
    }
  }
  SUBCASE("missing field") {
    CHECK_THROWS_AS(parse_model(R"({"slow_dim":1})"), ParseError);
    CHECK_THROWS_AS(parse_model("not json at all"), ParseError);
  }
}

TEST_CASE("parse of serialize is the identity on networks") {
  auto net = builtin_michaelis_menten(0.25, 1.5, 2.0, 0.125, 2);
  auto text = serialize_model(net);
  auto back = parse_model(text);
  CHECK(back.slow_dim == net.slow_dim);
  CHECK(back.fast_dim == net.fast_dim);
  CHECK(back.conservation == net.conservation);
  REQUIRE(back.reactions.size() == net.reactions.size());
  for (std::size_t r = 0; r < net.reactions.size(); ++r) {
    CHECK(back.reactions[r].gamma_x == net.reactions[r].gamma_x);
    CHECK(back.reactions[r].gamma_y == net.reactions[r].gamma_y);
    CHECK(back.reactions[r].cls == net.reactions[r].cls);
    REQUIRE(back.reactions[r].rate.monomials.size() ==
            net.reactions[r].rate.monomials.size());
    for (std::size_t m = 0; m < net.reactions[r].rate.monomials.size(); ++m) {
      CHECK(back.reactions[r].rate.monomials[m].k ==
            net.reactions[r].rate.monomials[m].k);
      CHECK(back.reactions[r].rate.monomials[m].x_exp ==
            net.reactions[r].rate.monomials[m].x_exp);
      CHECK(back.reactions[r].rate.monomials[m].y_exp ==
            net.reactions[r].rate.monomials[m].y_exp);
    }
  }
  // serialized form is stable bytes
  CHECK(serialize_model(back) == text);
}

TEST_CASE("michaelis-menten model document round-trips through parse") {
  auto net = mm_unit();
  auto parsed = parse_model(serialize_model(net));
  CHECK(parsed.reactions[1].rate.eval(std::vector<double>{2.0, 0.0},
                                      std::vector<int>{3, 0}) == 6.0);
}

TEST_CASE("rate functions are nonnegative on the state space") {
  auto net = mm_unit();
  for (const auto& rx : net.reactions)
    for (double x1 : {0.0, 0.5, 10.0})
      for (double x2 : {0.0, 3.0})
        for (int y1 : {0, 1, 5})
          CHECK(rx.rate.eval(std::vector<double>{x1, x2},
                             std::vector<int>{y1, 1 - y1 >= 0 ? 1 - y1 : 0}) >=
                0.0);
}
