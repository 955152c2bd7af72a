#include <Eigen/Eigenvalues>
#include <cmath>

#include "doctest.h"
#include "mshjb/errors.hpp"
#include "mshjb/hamiltonian.hpp"
#include "mshjb/rng.hpp"
#include "test_util.hpp"

using namespace mshjb;
using namespace mshjb::testutil;

namespace {

// Independent dense oracle: full spectrum via Eigen, take the eigenvalue of
// maximal real part.
double dense_principal_value(const TiltedOperator& op) {
  Eigen::MatrixXd Q(op.dim, op.dim);
  for (int i = 0; i < op.dim; ++i)
    for (int j = 0; j < op.dim; ++j)
      Q(i, j) = op.l(i, j) + (i == j ? op.V[static_cast<std::size_t>(i)] : 0.0);
  Eigen::EigenSolver<Eigen::MatrixXd> es(Q);
  double best = -1e300;
  for (int k = 0; k < op.dim; ++k)
    best = std::max(best, es.eigenvalues()(k).real());
  return best;
}

const double kLn2 = 0.6931471805599453;

}  // namespace

TEST_CASE("tilted operator entries match the hand-evaluated display") {
  auto net = mm_unit();
  auto fss = FastStateSpace::enumerate(2, 1);
  // lexicographic order: state 0 = (0,1) [one complex], state 1 = (1,0)
  std::vector<double> x{1.0, 1.0}, p{kLn2, 0.0};
  auto op = assemble_tilted(net, fss, x, p);

  REQUIRE(op.dim == 2);
  CHECK(op.V[1] == doctest::Approx(0.5).epsilon(1e-14));  // (2-1)+(0.5-1)
  CHECK(op.V[0] == doctest::Approx(2.0).epsilon(1e-14));  // (2-1)+(2-1)+0
  CHECK(op.l(1, 0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(op.l(0, 1) == doctest::Approx(3.0).epsilon(1e-14));
  // rows sum to zero exactly
  CHECK(op.l(0, 0) + op.l(0, 1) == 0.0);
  CHECK(op.l(1, 0) + op.l(1, 1) == 0.0);
}

TEST_CASE("zero momentum gives the untilted generator") {
  auto net = mm_unit();
  auto fss = FastStateSpace::enumerate(2, 1);
  std::vector<double> x{2.0, 0.5}, p{0.0, 0.0};
  auto op = assemble_tilted(net, fss, x, p);
  CHECK(op.V[0] == 0.0);
  CHECK(op.V[1] == 0.0);
  CHECK(op.l(1, 0) == doctest::Approx(2.0));  // k1 x1 y1 at y=(1,0)
  CHECK(op.l(0, 1) == doctest::Approx(2.0));  // (k2+k3) y2 at y=(0,1)
}

TEST_CASE("binding terms vanish on the x1 = 0 face") {
  auto net = mm_unit();
  auto fss = FastStateSpace::enumerate(2, 1);
  std::vector<double> x{0.0, 1.0}, p{0.3, -0.4};
  auto op = assemble_tilted(net, fss, x, p);
  CHECK(op.l(1, 0) == 0.0);  // k1 x1 y1 = 0
  CHECK(op.l(0, 1) > 0.0);
}

TEST_CASE("tilt exponent overflow is detected") {
  auto net = mm_unit();
  auto fss = FastStateSpace::enumerate(2, 1);
  std::vector<double> x{1.0, 1.0}, p{800.0, 0.0};
  CHECK_THROWS_AS(assemble_tilted(net, fss, x, p), OverflowError);
}

TEST_CASE("principal eigenvalue matches the 2x2 closed form") {
  auto net = mm_unit();
  auto fss = FastStateSpace::enumerate(2, 1);
  std::vector<double> x{1.0, 1.0}, p{kLn2, 0.0};
  auto op = assemble_tilted(net, fss, x, p);
  auto eig = principal_eigen(op, 1e-13, 200000);

  // oracle: trace/determinant quadratic for the hand-assembled matrix
  // [[0, 0.5], [3, -1]] (row order [(1,0),(0,1)])
  const double tr = -1.0, det = -1.5;
  const double oracle = 0.5 * (tr + std::sqrt(tr * tr - 4.0 * det));
  CHECK(oracle == doctest::Approx((-1.0 + std::sqrt(7.0)) / 2.0).epsilon(1e-15));
  CHECK(eig.value == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(eig.residual <= 1e-12 * (1.0 + std::abs(eig.value)));
  for (double r : eig.right) CHECK(r > 0.0);
  for (double w : eig.left) CHECK(w > 0.0);
}

TEST_CASE("p = 0 gives eigenvalue 0 and a constant right vector") {
  auto net = mm_unit();
  auto fss = FastStateSpace::enumerate(2, 1);
  std::vector<double> x{1.3, 0.7}, p{0.0, 0.0};
  auto op = assemble_tilted(net, fss, x, p);
  auto eig = principal_eigen(op, 1e-13, 200000);
  CHECK(std::abs(eig.value) <= 1e-12);
  CHECK(eig.right[0] == doctest::Approx(eig.right[1]).epsilon(1e-10));
}

TEST_CASE("one-dimensional fast space returns the bare potential") {
  // M = 0 freezes the fast space to the single state (0,0).
  MultiScaleNetwork net;
  net.slow_dim = 1;
  net.fast_dim = 2;
  net.conservation = 0;
  net.reactions = {{{1}, {0, 0}, poly1(2.0, {0}, {0, 0}),
                    ReactionClass::slow_only}};
  auto fss = FastStateSpace::enumerate(2, 0);
  REQUIRE(fss.size() == 1);
  std::vector<double> x{1.0}, p{1.0};
  auto op = assemble_tilted(net, fss, x, p);
  auto eig = principal_eigen(op, 1e-13, 1000);
  CHECK(eig.value == doctest::Approx(2.0 * (std::exp(1.0) - 1.0)).epsilon(1e-14));
}

TEST_CASE("eval_H at the worked example and at p = 0") {
  auto net = mm_unit();
  auto fss = FastStateSpace::enumerate(2, 1);
  std::vector<double> x{1.0, 1.0};

  auto at0 = eval_H(net, fss, x, std::vector<double>{0.0, 0.0});
  CHECK(std::abs(at0.value) <= 1e-12);

  auto hv = eval_H(net, fss, x, std::vector<double>{kLn2, 0.0});
  CHECK(hv.value ==
        doctest::Approx((-1.0 + std::sqrt(7.0)) / 2.0).epsilon(1e-12));
  // theta* is the left/right product, a strictly positive probability vector
  double sum = 0.0;
  for (double t : hv.theta_star) {
    CHECK(t > 0.0);
    sum += t;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  // right is max-normalized
  double rmax = 0.0;
  for (double r : hv.right) rmax = std::max(rmax, r);
  CHECK(rmax == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("power iteration agrees with the dense oracle up to |F_M| = 20") {
  Rng rng(7);
  for (long M : {1L, 2L, 3L, 5L, 9L, 14L, 19L}) {
    auto net = mm_unit(M);
    auto fss = FastStateSpace::enumerate(2, M);
    REQUIRE(fss.size() == M + 1);
    for (int rep = 0; rep < 5; ++rep) {
      std::vector<double> x{rng.uniform(0.1, 5.0), rng.uniform(0.1, 5.0)};
      std::vector<double> p{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
      auto op = assemble_tilted(net, fss, x, p);
      auto eig = principal_eigen(op, 1e-13, 500000);
      double oracle = dense_principal_value(op);
      CHECK(std::abs(eig.value - oracle) <=
            1e-10 * std::max(1.0, std::abs(oracle)));
    }
  }
}

TEST_CASE("gradient matches central finite differences") {
  auto net = mm_unit();
  auto fss = FastStateSpace::enumerate(2, 1);
  Rng rng(11);
  const double step = 1e-5;
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> x{rng.uniform(0.2, 4.0), rng.uniform(0.2, 4.0)};
    std::vector<double> p{rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)};
    auto hv = eval_H(net, fss, x, p);
    for (int i = 0; i < 2; ++i) {
      auto pp = p, pm = p;
      pp[static_cast<std::size_t>(i)] += step;
      pm[static_cast<std::size_t>(i)] -= step;
      double fd = (eval_H(net, fss, x, pp).value -
                   eval_H(net, fss, x, pm).value) /
                  (2.0 * step);
      double scale = std::max(1.0, std::abs(fd));
      CHECK(std::abs(hv.grad_p[static_cast<std::size_t>(i)] - fd) <=
            1e-4 * scale);
    }
  }
}

TEST_CASE("Lambda at point masses and the uniform measure") {
  auto net = mm_unit();
  auto fss = FastStateSpace::enumerate(2, 1);
  std::vector<double> x{1.0, 1.0}, p{kLn2, 0.0};
  // index 1 = (1,0)
  CHECK(eval_Lambda(net, fss, x, p, ThetaMeasure{{0.0, 1.0}}) ==
        doctest::Approx(0.5).epsilon(1e-14));
  CHECK(eval_Lambda(net, fss, x, p, ThetaMeasure{{0.5, 0.5}}) ==
        doctest::Approx(1.25).epsilon(1e-14));
  CHECK(eval_Lambda(net, fss, x, std::vector<double>{0.0, 0.0},
                    ThetaMeasure{{0.3, 0.7}}) == 0.0);
}

TEST_CASE("Donsker-Varadhan saddle: Lambda - I at theta* recovers H") {
  auto net = mm_unit();
  auto fss = FastStateSpace::enumerate(2, 1);
  Rng rng(3);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<double> x{rng.uniform(0.2, 4.0), rng.uniform(0.2, 4.0)};
    std::vector<double> p{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
    auto hv = eval_H(net, fss, x, p);
    ThetaMeasure ts{hv.theta_star};
    double lam = eval_Lambda(net, fss, x, p, ts);
    double cost = eval_I(net, fss, x, p, ts);
    CHECK(std::abs(lam - cost - hv.value) <= 1e-6);
    CHECK(cost >= -1e-10);
  }
}

TEST_CASE("I vanishes at the stationary measure of the untilted generator") {
  auto net = mm_unit();
  auto fss = FastStateSpace::enumerate(2, 1);
  std::vector<double> x{1.0, 1.0}, p{0.0, 0.0};
  auto hv = eval_H(net, fss, x, p);
  // at p = 0 the right vector is constant, so theta* is the stationary law
  double cost = eval_I(net, fss, x, p, ThetaMeasure{hv.theta_star});
  CHECK(std::abs(cost) <= 1e-8);
}

TEST_CASE("point masses are rejected as degenerate support") {
  auto net = mm_unit();
  auto fss = FastStateSpace::enumerate(2, 1);
  std::vector<double> x{1.0, 1.0}, p{0.0, 0.0};
  CHECK_THROWS_AS(eval_I(net, fss, x, p, ThetaMeasure{{0.0, 1.0}}),
                  DegenerateSupportError);
  CHECK_THROWS_AS(eval_I(net, fss, x, p, ThetaMeasure{{1.0, 0.0}}),
                  DegenerateSupportError);
}

TEST_CASE("sampled variational gap") {
  auto net = mm_unit();
  auto fss = FastStateSpace::enumerate(2, 1);
  std::vector<double> x{1.0, 1.0};

  SUBCASE("theta* inclusion forces a near-zero gap") {
    auto res = sup_theta_gap(net, fss, x, std::vector<double>{kLn2, 0.0}, 64, 0);
    CHECK(res.gap >= 0.0);
    CHECK(res.gap <= 1e-6);
  }
  SUBCASE("p = 0: every value is <= 0 and the gap is |best|") {
    auto res = sup_theta_gap(net, fss, x, std::vector<double>{0.0, 0.0}, 16, 1);
    CHECK(res.best <= 1e-10);
    CHECK(std::abs(res.hamiltonian) <= 1e-12);
    CHECK(res.gap == doctest::Approx(std::abs(res.best)).epsilon(1e-9));
  }
  SUBCASE("zero samples still include theta*") {
    auto res = sup_theta_gap(net, fss, x, std::vector<double>{0.5, -0.3}, 0, 0);
    REQUIRE(res.sampled_values.size() == 1);
    CHECK(res.gap >= 0.0);
    CHECK(res.gap <= 1e-6);
  }
}

TEST_CASE("lower bound: Lambda - I never exceeds H beyond tolerance") {
  auto net = mm_unit();
  auto fss = FastStateSpace::enumerate(2, 1);
  Rng rng(17);
  for (int rep = 0; rep < 8; ++rep) {
    std::vector<double> x{rng.uniform(0.2, 4.0), rng.uniform(0.2, 4.0)};
    std::vector<double> p{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
    auto res = sup_theta_gap(net, fss, x, p, 32, 100 + rep);
    for (double v : res.sampled_values) CHECK(v <= res.hamiltonian + 1e-8);
  }
}

TEST_CASE("convexity and normalization of the eigenvalue Hamiltonian") {
  auto net = mm_unit();
  auto fss = FastStateSpace::enumerate(2, 1);
  Rng rng(23);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> x{rng.uniform(0.1, 5.0), rng.uniform(0.1, 5.0)};
    CHECK(std::abs(eval_H(net, fss, x, std::vector<double>{0.0, 0.0}).value) <=
          1e-10);
    std::vector<double> p1{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
    std::vector<double> p2{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
    double t = rng.uniform();
    std::vector<double> pm{t * p1[0] + (1 - t) * p2[0],
                           t * p1[1] + (1 - t) * p2[1]};
    double lhs = eval_H(net, fss, x, pm).value;
    double rhs = t * eval_H(net, fss, x, p1).value +
                 (1 - t) * eval_H(net, fss, x, p2).value;
    CHECK(lhs <= rhs + 1e-9);
  }
}

TEST_CASE("boundary slow state degrades gracefully instead of failing") {
  auto net = mm_unit();
  auto fss = FastStateSpace::enumerate(2, 1);
  // At x1 = 0 the fast graph loses the binding edge; the dominant block is
  // the isolated no-complex state, so H = k0 (e^{p1} - 1) exactly.
  std::vector<double> x{0.0, 1.0}, p{0.5, 0.2};
  auto hv = eval_H(net, fss, x, p);
  CHECK_FALSE(hv.positive);
  CHECK(hv.value == doctest::Approx(std::exp(0.5) - 1.0).epsilon(1e-10));
}

TEST_CASE("control Hamiltonian: eikonal family") {
  auto ch = eikonal_family(2);
  auto ev = eval_H_control(ch, std::vector<double>{0.3, 0.4},
                           std::vector<double>{2.0, 0.0});
  CHECK(ev.value == doctest::Approx(1.0));  // |p|_inf - 1
  CHECK(ev.argmax_label == "+e1");

  // p = 0: value = -min cost = -1
  auto ev0 = eval_H_control(ch, std::vector<double>{1.0, 1.0},
                            std::vector<double>{0.0, 0.0});
  CHECK(ev0.value == doctest::Approx(-1.0));
  CHECK(ev0.argmax_index == 0);  // tie-break lowest index
}

TEST_CASE("control Hamiltonian: degenerate single control") {
  ControlHamiltonian ch;
  ch.slow_dim = 2;
  Control c;
  c.label = "rest";
  c.drift = {poly1(0.0, {0, 0}, {}), poly1(0.0, {0, 0}, {})};
  c.cost = poly1(0.0, {0, 0}, {});
  ch.controls = {c};
  for (double p1 : {-3.0, 0.0, 7.5})
    CHECK(eval_H_control(ch, std::vector<double>{1.0, 2.0},
                         std::vector<double>{p1, 0.5})
              .value == 0.0);
}

TEST_CASE("uniform cost shift lowers the control value exactly") {
  // dyadic costs keep the identity exact in floating point
  auto ch = eikonal_family(2);
  const double shift = 0.25;
  auto shifted = ch;
  for (auto& ctl : shifted.controls)
    ctl.cost.monomials[0].k += shift;
  std::vector<double> x{1.0, 1.0};
  for (double p1 : {0.0, 0.5, -2.0, 3.25}) {
    std::vector<double> p{p1, 0.75};
    double a = eval_H_control(ch, x, p).value;
    double b = eval_H_control(shifted, x, p).value;
    CHECK(a - shift == b);
  }
}

TEST_CASE("zero-cost control makes H(x,0) exactly zero") {
  auto ch = eikonal_family(2);
  for (auto& ctl : ch.controls) ctl.cost.monomials[0].k = 0.0;
  auto ev = eval_H_control(ch, std::vector<double>{1.0, 1.0},
                           std::vector<double>{0.0, 0.0});
  CHECK(ev.value == 0.0);
}

TEST_CASE("disconnected fast states converge with the positivity flag down") {
  // no fast coupling at all: two isolated states with distinct potentials
  MultiScaleNetwork net;
  net.slow_dim = 1;
  net.fast_dim = 2;
  net.conservation = 1;
  net.reactions = {{{1}, {0, 0}, poly1(1.0, {0}, {0, 1}),
                    ReactionClass::slow_only}};
  auto fss = FastStateSpace::enumerate(2, 1);
  std::vector<double> x{1.0}, p{1.0};
  // rates y_2: state (0,1) has potential e - 1, state (1,0) has 0
  auto op = assemble_tilted(net, fss, x, p);
  auto eig = principal_eigen(op, 1e-12, 200000);
  CHECK(eig.value == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-12));
  CHECK_FALSE(eig.positive);
}

TEST_CASE("Lambda validates the measure dimension and tilt range") {
  auto net = mm_unit();
  auto fss = FastStateSpace::enumerate(2, 1);
  std::vector<double> x{1.0, 1.0};
  CHECK_THROWS_AS(eval_Lambda(net, fss, x, std::vector<double>{0.0, 0.0},
                              ThetaMeasure{{1.0}}),
                  ConfigError);
  CHECK_THROWS_AS(eval_Lambda(net, fss, x, std::vector<double>{800.0, 0.0},
                              ThetaMeasure{{0.5, 0.5}}),
                  OverflowError);
}
