#include "doctest.h"

#include "ym/lie_algebra.hpp"
#include "ym/lie_exact.hpp"

using namespace ym;

namespace {
constexpr std::complex<double> I{0.0, 1.0};
}

TEST_CASE("su(2) basis matches Pauli matrices") {
  LieAlgebra su2 = gell_mann_basis(2);
  CHECK(su2.dim() == 3);
  Mat s12 = gm_symmetric(2, 0, 1);
  CHECK((su2.basis(0) - I * s12).norm() == doctest::Approx(0.0));
  Mat d1 = gm_diagonal(2, 1);
  CHECK(d1(0, 0).real() == 1.0);
  CHECK(d1(1, 1).real() == -1.0);
}

TEST_CASE("bracket of Pauli generators") {
  // [iS12/2, iA12/2] = -iD1/2 in su(2)
  Mat x = 0.5 * I * gm_symmetric(2, 0, 1);
  Mat y = 0.5 * I * gm_antisymmetric(2, 0, 1);
  Mat expected = -0.5 * I * gm_diagonal(2, 1);
  CHECK((bracket(x, y) - expected).norm() < 1e-14);
}

TEST_CASE("bracket is antisymmetric and closed") {
  LieAlgebra su3 = gell_mann_basis(3);
  CHECK(su3.dim() == 8);
  std::mt19937_64 rng(7);
  Mat x = su3.random_element(rng);
  CHECK(bracket(x, x).norm() < 1e-12);
  // brute-force structure constants: every [e_a,e_b] re-expands exactly
  for (int a = 0; a < su3.dim(); ++a)
    for (int b = 0; b < su3.dim(); ++b) {
      Mat lhs = bracket(su3.basis(a), su3.basis(b));
      Vec c = su3.coefficients(lhs);
      CHECK((su3.from_coefficients(c) - lhs).norm() < 1e-10);
      for (int k = 0; k < su3.dim(); ++k)
        CHECK(su3.structure(a, b, k) == doctest::Approx(-su3.structure(b, a, k)).epsilon(1e-12));
    }
}

TEST_CASE("Jacobi identity and Ad-invariance on basis triples") {
  LieAlgebra su3 = gell_mann_basis(3);
  for (int a = 0; a < su3.dim(); ++a)
    for (int b = 0; b < su3.dim(); ++b)
      for (int c = 0; c < su3.dim(); ++c) {
        const Mat &X = su3.basis(a), &Y = su3.basis(b), &Z = su3.basis(c);
        Mat jac = bracket(X, bracket(Y, Z)) + bracket(Y, bracket(Z, X)) + bracket(Z, bracket(X, Y));
        CHECK(jac.norm() < 1e-12);
        double lhs = su3.inner(bracket(Z, X), Y);
        double rhs = -su3.inner(X, bracket(Z, Y));
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
      }
}

TEST_CASE("gell_mann_basis validates input and properties") {
  CHECK_THROWS_AS(gell_mann_basis(1), std::invalid_argument);
  LieAlgebra su4 = gell_mann_basis(4);
  CHECK(su4.dim() == 15);
  for (int a = 0; a < su4.dim(); ++a) {
    CHECK((su4.basis(a) + su4.basis(a).adjoint()).norm() < 1e-14);
    CHECK(std::abs(su4.basis(a).trace()) < 1e-14);
  }
}

TEST_CASE("nested commutator identities from the su(2) computation") {
  // plain (non-i) matrices: S12 = c(A12,S12)/4, D1 = c(S12,D1)/4
  Mat s = gm_symmetric(2, 0, 1), a = gm_antisymmetric(2, 0, 1), d = gm_diagonal(2, 1);
  CHECK((0.25 * nested(a, s) - s).norm() < 1e-14);
  CHECK((0.25 * nested(s, a) - a).norm() < 1e-14);
  CHECK((0.25 * nested(s, d) - d).norm() < 1e-14);
  CHECK(nested(s, s).norm() == 0.0);
}

TEST_CASE("nested span dimension n^2-1") {
  for (int n = 2; n <= 4; ++n) {
    LieAlgebra alg = gell_mann_basis(n);
    CHECK(nested_span_dimension(alg) == n * n - 1);
  }
  CHECK(bracket_span_dimension(gell_mann_basis(2)) == 3);
}

TEST_CASE("diagonal recursion, floating point and exact") {
  LieAlgebra su3 = gell_mann_basis(3);
  Mat d2 = I * gm_diagonal(3, 2);
  CHECK((diagonal_recursion_rhs(3, 2) - d2).norm() < 1e-13);
  CHECK((diagonal_recursion_rhs(4, 3) - I * gm_diagonal(4, 3)).norm() < 1e-13);
  CHECK((diagonal_recursion_rhs(5, 2) - I * gm_diagonal(5, 2)).norm() < 1e-13);
  CHECK_THROWS_AS(diagonal_recursion_rhs(3, 5), std::out_of_range);

  for (int n = 3; n <= 6; ++n)
    for (int l = 2; l <= n - 1; ++l) CHECK(exact::diagonal_recursion_holds(n, l));
}

TEST_CASE("centre computation") {
  CHECK(gell_mann_basis(2).centre_dim() == 0);
  LieAlgebra u2 = unitary_algebra(2);
  REQUIRE(u2.centre_dim() == 1);
  // centre spanned by i*Id
  Vec c = u2.centre()[0];
  Mat z = u2.from_coefficients(c);
  Mat id = Mat::Identity(2, 2);
  CHECK(bracket(z, u2.basis(0)).norm() < 1e-10);
  CHECK((z * z.adjoint() - (z * z.adjoint()).trace() / 2.0 * id).norm() < 1e-10);

  LieAlgebra block = direct_sum(unitary_algebra(1), gell_mann_basis(2));
  CHECK(block.centre_dim() == 1);
}

TEST_CASE("centre_split projections") {
  LieAlgebra u2 = unitary_algebra(2);
  std::mt19937_64 rng(42);
  Mat zc = I * Mat::Identity(2, 2);
  auto [z_part, g_part] = u2.centre_split(zc);
  CHECK((z_part - zc).norm() < 1e-10);
  CHECK(g_part.norm() < 1e-10);

  Mat x1 = gell_mann_basis(2).basis(1);
  auto [z2, g2] = u2.centre_split(x1);
  CHECK(z2.norm() < 1e-10);
  CHECK((g2 - x1).norm() < 1e-10);

  for (int trial = 0; trial < 10; ++trial) {
    Mat x = u2.random_element(rng);
    auto [xz, x1c] = u2.centre_split(x);
    CHECK((xz + x1c - x).norm() < 1e-9);
    CHECK(std::abs(u2.inner(xz, x1c)) < 1e-9);
    double n2 = u2.inner(x, x), nz = u2.inner(xz, xz), n1 = u2.inner(x1c, x1c);
    CHECK(n2 == doctest::Approx(nz + n1).epsilon(1e-9));
    // idempotence
    auto [xzz, rem] = u2.centre_split(xz);
    CHECK((xzz - xz).norm() < 1e-9);
    CHECK(rem.norm() < 1e-9);
  }
}
