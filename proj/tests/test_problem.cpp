#include <catch_amalgamated.hpp>

#include "csg/problem.hpp"

namespace {

csg::ObjectiveProblem sphere(std::size_t n) {
  return {csg::Vec(n, -5.0), csg::Vec(n, 5.0), [](const csg::Vec& x) {
            double s = 0;
            for (double v : x) s += v * v;
            return s;
          }};
}

}  // namespace

TEST_CASE("evaluate returns the objective and charges one stage counter") {
  auto p = sphere(2);
  CHECK(csg::evaluate(p, {0.0, 0.0}, csg::Stage::additive) == 0.0);
  CHECK(csg::evaluate(p, {1.0, 2.0}, csg::Stage::gss) == 5.0);
  CHECK(csg::evaluate(p, {1.0, 2.0}, csg::Stage::optimization) == 5.0);
  CHECK(p.fe().additive_stage == 1);
  CHECK(p.fe().gss_stage == 1);
  CHECK(p.fe().optimization == 1);
  CHECK(p.fe().total() == 3);
}

TEST_CASE("ledger budget raises instead of silently truncating") {
  auto p = sphere(2);
  p.fe().budget = 2;
  csg::evaluate(p, {0.0, 0.0}, csg::Stage::baseline);
  CHECK(p.fe().remaining() == 1);
  csg::evaluate(p, {0.0, 0.0}, csg::Stage::baseline);
  CHECK(p.fe().remaining() == 0);
  CHECK_THROWS_AS(csg::evaluate(p, {0.0, 0.0}, csg::Stage::baseline), csg::BudgetExhausted);
  CHECK(p.fe().total() == 2);  // the failed call did not count
}

TEST_CASE("problem construction validates bounds") {
  CHECK_THROWS_AS(csg::ObjectiveProblem({}, {}, [](const csg::Vec&) { return 0.0; }),
                  std::invalid_argument);
  CHECK_THROWS_AS(csg::ObjectiveProblem({0.0}, {0.0}, [](const csg::Vec&) { return 0.0; }),
                  std::invalid_argument);
  CHECK_THROWS_AS(csg::ObjectiveProblem({0.0, 1.0}, {1.0}, [](const csg::Vec&) { return 0.0; }),
                  std::invalid_argument);
}

TEST_CASE("midpoint and range derive from the bounds") {
  csg::ObjectiveProblem p({-5.0, 1.0}, {5.0, 2.0}, [](const csg::Vec&) { return 0.0; });
  CHECK(p.midpoint() == csg::Vec{0.0, 1.5});
  CHECK(p.range(0) == 10.0);
  CHECK(p.range(1) == 1.0);
}

TEST_CASE("grouping result: separable union is the sorted union of the classes") {
  csg::GroupingResult g;
  g.additively_separable = {4, 0};
  g.multiplicatively_separable = {2};
  g.generally_separable = {3};
  CHECK(g.separable_union() == csg::IndexSet{0, 2, 3, 4});
}

TEST_CASE("grouping result: partition validity is disjoint and exhaustive") {
  csg::GroupingResult g;
  g.additively_separable = {0, 1};
  g.multiplicatively_separable = {2};
  g.nonseparable_groups = {{3, 4}};
  CHECK(g.valid_partition(5));
  CHECK_FALSE(g.valid_partition(6));  // not exhaustive

  csg::GroupingResult dup = g;
  dup.generally_separable = {4};  // overlaps the group
  CHECK_FALSE(dup.valid_partition(5));

  csg::GroupingResult hole = g;
  hole.nonseparable_groups = {{3}};
  CHECK_FALSE(hole.valid_partition(5));

  csg::GroupingResult empty_group = g;
  empty_group.nonseparable_groups = {{3, 4}, {}};
  CHECK_FALSE(empty_group.valid_partition(5));
}
