#include <doctest.h>

#include <random>

#include "sospopt/param_vector.hpp"

using sospopt::ParamVector;

TEST_SUITE("param_vector") {

TEST_CASE("segments are disjoint and cover the vector exactly") {
  ParamVector p({{"W", 3, 4}, {"b", 3, 1}, {"a", 2, 1}});
  CHECK(p.dim() == 17);
  Eigen::Index expected_offset = 0;
  for (const auto& s : p.segments()) {
    CHECK(s.offset == expected_offset);
    expected_offset += s.size();
  }
  CHECK(expected_offset == p.dim());
}

TEST_CASE("read then write back is the identity") {
  ParamVector p({{"W", 2, 3}, {"b", 2, 1}});
  std::mt19937_64 eng(7);
  std::uniform_real_distribution<double> unif(-1, 1);
  for (Eigen::Index i = 0; i < p.dim(); ++i) p.data()[i] = unif(eng);
  const Eigen::VectorXd before = p.data();

  const Eigen::MatrixXd w = p.matrix("W");
  const Eigen::VectorXd b = p.vector("b");
  p.set_matrix("W", w);
  p.set_vector("b", b);
  CHECK(p.data() == before);
}

TEST_CASE("matrix views use column-major flattening") {
  ParamVector p({{"W", 2, 2}});
  p.data() << 1, 2, 3, 4;
  const Eigen::MatrixXd w = p.matrix("W");
  CHECK(w(0, 0) == 1);
  CHECK(w(1, 0) == 2);
  CHECK(w(0, 1) == 3);
  CHECK(w(1, 1) == 4);
}

TEST_CASE("validation") {
  CHECK_THROWS_AS(ParamVector({{"x", 2, 1}, {"x", 3, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(ParamVector({{"", 2, 1}}), std::invalid_argument);
  ParamVector p({{"W", 2, 2}});
  CHECK_THROWS_AS(p.set_matrix("W", Eigen::MatrixXd::Zero(3, 3)),
                  std::invalid_argument);
  CHECK_THROWS_AS(p.matrix("missing"), std::invalid_argument);
}

TEST_CASE("flat helper") {
  Eigen::VectorXd v(3);
  v << 1, 2, 3;
  ParamVector p = ParamVector::flat(v);
  CHECK(p.dim() == 3);
  CHECK(p.vector("x")[2] == 3);
}

}  // TEST_SUITE
