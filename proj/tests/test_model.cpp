#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "oracles.hpp"
#include "pjb/errors.hpp"
#include "pjb/model.hpp"

using namespace pjb;

TEST_CASE("parse_word") {
  CHECK(parse_word("ooooe").str() == "ooooe");
  CHECK(parse_word("e").size() == 1);
  CHECK(parse_word("OoE").str() == "ooe");
  CHECK_THROWS_AS(parse_word(""), DomainError);
  CHECK_THROWS_AS(parse_word("oxe"), DomainError);
  CHECK_THROWS_AS(parse_word("o e"), DomainError);
}

TEST_CASE("word_index uses first letter as most significant bit") {
  CHECK(word_index(parse_word("ooooe")) == 1);
  CHECK(word_index(parse_word("eoooe")) == 17);
  CHECK(word_index(parse_word("eooee")) == 19);
  CHECK(word_index(parse_word("ooeee")) == 7);
  CHECK(word_index(parse_word("eeeee")) == 31);
  CHECK(word_index(parse_word("ooooo")) == 0);
  CHECK(word_index(parse_word("eo")) == 2);
}

TEST_CASE("word_from_index round-trips") {
  for (std::size_t len = 1; len <= 7; ++len) {
    for (std::uint64_t k = 0; k < (1u << len); ++k) {
      const Word w = word_from_index(len, k);
      CHECK(w.size() == len);
      CHECK(word_index(w) == k);
      CHECK(parse_word(w.str()) == w);
    }
  }
  CHECK_THROWS_AS(word_from_index(3, 8), DomainError);
  CHECK_THROWS_AS(word_from_index(0, 0), DomainError);
}

TEST_CASE("couplings follow t or |t|") {
  const Word w = parse_word("oe");
  CHECK(couplings(w, -0.2) == std::vector<double>{-0.2, 0.2});
  CHECK(couplings(w, 0.3) == std::vector<double>{0.3, 0.3});
}

TEST_CASE("build_operator reproduces the ten-site ooooe matrix") {
  const double t = -0.13;
  const LatticeOperator q = build_operator(10, parse_word("ooooe"), t);
  const Eigen::VectorXd sub = q.sub();
  const Eigen::VectorXd sup = q.sup();
  for (int k = 0; k < 9; ++k) {
    const double expected = k == 4 ? std::abs(t) : t;
    CHECK(sub(k) == doctest::Approx(expected));
    CHECK(sup(k) == doctest::Approx(1.0 - expected));
  }
  CHECK(q.dense().diagonal().isZero());
}

TEST_CASE("build_operator small instances") {
  const LatticeOperator q = build_operator(2, parse_word("o"), 0.1);
  CHECK(q.dense()(0, 0) == 0.0);
  CHECK(q.dense()(0, 1) == doctest::Approx(0.9));
  CHECK(q.dense()(1, 0) == doctest::Approx(0.1));
  CHECK(q.dense()(1, 1) == 0.0);

  // odd N: middle parameter J appears at positions J and J+1 = N - J
  const LatticeOperator odd = build_operator(5, parse_word("oe"), -0.2);
  CHECK(odd.sub()(0) == doctest::Approx(-0.2));
  CHECK(odd.sub()(1) == doctest::Approx(0.2));
  CHECK(odd.sub()(2) == doctest::Approx(0.2));
  CHECK(odd.sub()(3) == doctest::Approx(-0.2));
}

TEST_CASE("build_operator errors") {
  CHECK_THROWS_AS(build_operator(10, parse_word("oooo"), 0.1), DomainError);
  CHECK_THROWS_AS(build_operator(1, parse_word("o"), 0.1), DomainError);
  CHECK_THROWS_AS(build_operator(4, parse_word("oo"), std::nan("")), DomainError);
  CHECK_THROWS_AS(build_operator(4, parse_word("oo"), INFINITY), DomainError);
}

TEST_CASE("jordan_block") {
  Eigen::MatrixXd j3(3, 3);
  j3 << 0, 1, 0, 0, 0, 1, 0, 0, 0;
  CHECK(jordan_block(3).dense() == j3);
  CHECK(jordan_block(10).dense() == build_operator(10, parse_word("ooooe"), 0.0).dense());
  const Eigen::MatrixXd j2 = jordan_block(2).dense();
  CHECK(j2.trace() == 0.0);
  CHECK(Eigen::FullPivLU<Eigen::MatrixXd>(j2).rank() == 1);
  CHECK_THROWS_AS(jordan_block(1), DomainError);
}

TEST_CASE("structural invariants on random instances") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> dim(2, 30);
  std::uniform_real_distribution<double> time(-0.5, 0.5);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = dim(rng);
    const Word w = oracle::random_word(rng, static_cast<std::size_t>(n / 2));
    const double t = time(rng);
    const LatticeOperator q = build_operator(n, w, t);
    const Eigen::MatrixXd& a = q.dense();

    // tridiagonal, zero diagonal, mirrored parameter layout
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (std::abs(i - j) != 1) CHECK(a(i, j) == 0.0);
      }
    }
    for (int k = 1; k < n; ++k) {
      CHECK(a(k, k - 1) == a(n - k, n - k - 1));
      CHECK(a(k, k - 1) + a(k - 1, k) == doctest::Approx(1.0));
    }

    // parity: D Q D^{-1} = -Q with D = diag(1, -1, 1, ...)
    Eigen::VectorXd d(n);
    for (int i = 0; i < n; ++i) d(i) = i % 2 ? -1.0 : 1.0;
    CHECK((d.asDiagonal() * a * d.asDiagonal() + a).isZero());

    // word independence for t >= 0
    const Word other = oracle::random_word(rng, w.size());
    CHECK(build_operator(n, w, std::abs(t)).dense() == build_operator(n, other, std::abs(t)).dense());

    // t = 0 collapses to the Jordan block
    const Eigen::MatrixXd z = build_operator(n, w, 0.0).dense();
    CHECK(z == jordan_block(n).dense());
    CHECK(Eigen::FullPivLU<Eigen::MatrixXd>(z).rank() == n - 1);
  }
}

TEST_CASE("default range flag") {
  CHECK_FALSE(outside_default_range(0.5));
  CHECK(outside_default_range(0.51));
  CHECK(outside_default_range(-0.7));
}
