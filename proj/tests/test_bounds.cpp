#include <doctest.h>

#include <numeric>
#include <random>
#include <sstream>

#include "slimkit/bounds.hpp"

using namespace slimkit;

TEST_CASE("resolution from the minimum margin") {
  // x = (1, 0) and (0, -1) with rho = (1, 1): normalized margins 1/sqrt(2)
  Eigen::MatrixXd X(2, 2);
  X << 1, 0, 0, -1;
  Eigen::VectorXi y(2);
  y << 1, -1;
  const Dataset d = make_dataset(X, y);
  Eigen::VectorXd rho(2);
  rho << 1, 1;
  const ResolutionBound b = min_margin_lambda(rho, d);
  CHECK(b.gamma == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(b.x_max == doctest::Approx(1.0));
  CHECK(b.bound == doctest::Approx(1.0));
  CHECK(b.lambda == 2);
  CHECK_FALSE(b.zero_margin);
  CHECK(kth_margin_lambda(rho, d, 2).degenerate);
  CHECK_THROWS(kth_margin_lambda(rho, d, 3));
  CHECK_THROWS(kth_margin_lambda(rho, d, 0));

  const MarginProfile p = margin_profile(rho, d);
  CHECK(p.order.size() == 2);
  CHECK(p.norms[0] == doctest::Approx(1.0));
}

TEST_CASE("zero margin is flagged") {
  Eigen::MatrixXd X(2, 1);
  X << 0, 1;
  Eigen::VectorXi y(2);
  y << 1, 1;
  Eigen::VectorXd rho(1);
  rho << 1;
  CHECK(min_margin_lambda(rho, make_dataset(X, y)).zero_margin);
}

TEST_CASE("rounding onto the grid") {
  Eigen::VectorXd rho(2);
  rho << 3, 4;
  CHECK(round_to_grid(rho, 10) == Eigen::Vector2d(6, 8));
  rho << 1, -1;
  // 5 / sqrt(2) = 3.54 rounds to 4 in magnitude
  CHECK(round_to_grid(rho, 5) == Eigen::Vector2d(4, -4));
  CHECK_THROWS(round_to_grid(Eigen::Vector2d::Zero(), 5));
  CHECK_THROWS(round_to_grid(rho, 0));
}

TEST_CASE("mistakes count zero scores") {
  Eigen::MatrixXd X(3, 1);
  X << 1, 0, -1;
  Eigen::VectorXi y(3);
  y << 1, 1, 1;
  Eigen::VectorXd c(1);
  c << 1;
  CHECK(zero_one_mistakes(c, make_dataset(X, y)) == 2);
}

TEST_CASE("hypothesis counts") {
  CHECK(l0_hypothesis_count(2, 2, 1.0) == 1 + 2 * 4);  // at most one nonzero
  CHECK(l0_hypothesis_count(1, 2, 1.0) == 5);
  CHECK(l0_hypothesis_count(3, 2, 0.01) == 125);
  CHECK(coprime_count(1, 5) == 2);
  CHECK(coprime_count(2, 2) == 16);  // 24 nonzero vectors less 8 with gcd 2
  CHECK(coprime_count(3, 10) == coprime_count_enumerated(3, 10));
  CHECK(coprime_count_enumerated(2, 10) == 256);
  CHECK_THROWS_AS(coprime_count_enumerated(8, 100, 1000), std::length_error);
  CHECK(coprime_density(2, 2) == doctest::Approx(16.0 / 25.0));
  CHECK(farey_count(1, 5) == 10);  // 1 + 1 + 2 + 2 + 4
  CHECK(farey_count(2, 2) == 1 + 3);
  const BigInt big = coprime_count(40, 100);
  CHECK(log_big(big) == doctest::Approx(40 * std::log(201.0)).epsilon(1e-3));
}

TEST_CASE("occam gaps and the density table") {
  CHECK(occam_gap(BigInt(1024), 1000, 0.01) == doctest::Approx(0.0759495).epsilon(1e-6));
  std::istringstream csv(density_csv({1, 2}, {1, 10}, 0.05, 100));
  std::string header;
  std::getline(csv, header);
  CHECK(header == "P,Lambda,count,density,full_gap,coprime_gap,gap_improvement");
  int rows = 0;
  for (std::string line; std::getline(csv, line);) ++rows;
  CHECK(rows == 4);
}
