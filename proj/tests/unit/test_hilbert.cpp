#include "usc/error.hpp"
#include "usc/hilbert.hpp"

#include <doctest.h>

#include <cmath>

using namespace usc;

TEST_CASE("layout dimensions") {
  const SpaceLayout l(5, 2, true);
  CHECK(l.total_dim() == 5 * 8);
  CHECK(l.n_two_level() == 3);
  CHECK(l.probe_index() == 2);
  Index product = 1;
  for (int s = 0; s < l.subsystem_count(); ++s) product *= l.subsystem_dim(s);
  CHECK(product == l.total_dim());
  CHECK_THROWS_AS(SpaceLayout(1, 0, false), InvalidLayout);
  CHECK_THROWS_AS(SpaceLayout(4, 1, false).probe_index(), InvalidLayout);
}

TEST_CASE("lowest truncation of a") {
  const Operator a = annihilation(SpaceLayout(2, 0, false));
  Operator expected = Operator::Zero(2, 2);
  expected(0, 1) = 1.0;
  CHECK(max_abs(a - expected) == 0.0);
}

TEST_CASE("number operator and ladder matrix elements") {
  const SpaceLayout l(4, 0, false);
  const Operator n = number(l);
  for (int k = 0; k < 4; ++k) CHECK(n(k, k).real() == doctest::Approx(k));
  const Operator a = annihilation(l);
  for (int k = 1; k < 4; ++k) CHECK(a(k - 1, k).real() == doctest::Approx(std::sqrt(k)));

  const SpaceLayout big(30, 1, false);
  const Operator nb = number(big);
  for (int k = 0; k < 30 - 5; ++k) {
    const StateVector v = basis_state(big, k, {1});
    CHECK(((nb * v) - double(k) * v).norm() == 0.0);
  }
}

TEST_CASE("canonical commutator below the truncation edge") {
  const SpaceLayout l(30, 0, false);
  const Operator c = commutator(annihilation(l), creation(l));
  const Operator block = c.topLeftCorner(25, 25) - Operator::Identity(25, 25);
  CHECK(max_abs(block) < 1e-12);
  // The truncation shows up only in the last Fock state.
  CHECK(std::abs(c(29, 29) - Complex(-29.0)) < 1e-12);
}

TEST_CASE("pauli conventions") {
  const Operator sx = local_pauli(PauliAxis::x);
  CHECK(sx(0, 1) == Complex(1.0));
  CHECK(sx(1, 0) == Complex(1.0));
  const Operator sz = local_pauli(PauliAxis::z);
  CHECK(sz(1, 1) == Complex(1.0));   // |e>
  CHECK(sz(0, 0) == Complex(-1.0));  // |g>

  const SpaceLayout l(3, 2, true);
  const Operator x1 = pauli(l, 0, PauliAxis::x);
  CHECK(max_abs(x1 * x1 - identity(l)) < 1e-15);
  CHECK(max_abs(commutator(x1, pauli(l, 1, PauliAxis::x))) < 1e-12);
  CHECK(max_abs(commutator(pauli(l, 1, PauliAxis::z), pauli(l, 2, PauliAxis::x))) < 1e-12);
  CHECK_THROWS(pauli(l, 3, PauliAxis::x));
}

TEST_CASE("embedding") {
  const SpaceLayout l(3, 2, false);
  CHECK(max_abs(embed(l, 1, Operator::Identity(2, 2)) - identity(l)) == 0.0);
  CHECK(std::abs(embed(l, 2, local_pauli(PauliAxis::z)).trace()) < 1e-15);
  const Operator a = annihilation(l);
  const Operator s = pauli(l, 0, PauliAxis::x);
  CHECK(max_abs(a * s - s * a) < 1e-12);
  // embed(A) embed(B) = embed(AB) on one subsystem
  const Operator A = local_pauli(PauliAxis::x), B = local_pauli(PauliAxis::z);
  CHECK(max_abs(embed(l, 1, A) * embed(l, 1, B) - embed(l, 1, A * B)) < 1e-12);
  CHECK_THROWS_AS(embed(l, 1, Operator::Identity(3, 3)), DimensionMismatch);
}

TEST_CASE("tensor order puts the Fock index slowest") {
  const SpaceLayout l(3, 1, true);
  // |n=1, q=e, probe=g> -> index (1*2 + 1)*2 + 0
  const StateVector v = basis_state(l, 1, {1, 0});
  CHECK(v(6) == Complex(1.0));
  const Operator pe = excited_projector(l, 1);
  CHECK(std::abs((v.adjoint() * pe * v)(0, 0)) == 0.0);
  CHECK(std::abs((v.adjoint() * excited_projector(l, 0) * v)(0, 0) - 1.0) < 1e-15);
}

TEST_CASE("parity operator") {
  const SpaceLayout l(4, 1, true);
  const Operator p = parity_operator(l);
  CHECK(max_abs(p * p - identity(l)) == 0.0);
  CHECK(p(0, 0).real() == 1.0);
  // one photon, both two-level systems excited: odd + 2 = odd
  const StateVector v = basis_state(l, 1, {1, 1});
  CHECK((v.adjoint() * p * v)(0, 0).real() == -1.0);
  // a flips parity
  CHECK(max_abs(p * annihilation(l) + annihilation(l) * p) == 0.0);
}

TEST_CASE("hermiticity helpers") {
  const SpaceLayout l(5, 1, false);
  CHECK(hermiticity_error(quadrature(l)) == 0.0);
  CHECK(hermiticity_error(annihilation(l)) > 0.5);
}
