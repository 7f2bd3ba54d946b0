#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "edl/verify.hpp"

using namespace edl;
using verify::Check;

namespace {

void check_all_pass(const std::vector<Check>& checks) {
  for (const Check& c : checks) {
    INFO("check ", c.name, ": observed ", c.observed, " expected ", c.expected, " tolerance ",
         c.tolerance);
    CHECK(c.pass());
  }
}

}  // namespace

TEST_CASE("Check::pass applies the absolute tolerance") {
  CHECK(Check{"x", 1.0, 1.0, 0.0}.pass());
  CHECK(Check{"x", 1.0 + 1e-9, 1.0, 1e-8}.pass());
  CHECK(!Check{"x", 1.0 + 1e-7, 1.0, 1e-8}.pass());
  CHECK(!Check{"x", 2.0, -2.0, 1.0}.pass());
}

TEST_CASE("the special-function suite passes and is deterministic") {
  const auto checks = verify::suite_special();
  CHECK(checks.size() >= 5);
  check_all_pass(checks);
  const auto again = verify::suite_special();
  REQUIRE(again.size() == checks.size());
  for (std::size_t i = 0; i < checks.size(); ++i) {
    CHECK(again[i].name == checks[i].name);
    CHECK(again[i].observed == checks[i].observed);
  }
}

TEST_CASE("the dirichlet suite passes at the default budget") {
  const auto checks = verify::suite_dirichlet(1, 200000);
  CHECK(checks.size() >= 5);
  check_all_pass(checks);
  // z-scored checks stay standardized: expected 0, tolerance a z bound
  bool saw_z = false;
  for (const Check& c : checks) {
    if (c.name.find("_z") != std::string::npos) {
      saw_z = true;
      CHECK(c.expected == 0.0);
      CHECK(c.tolerance >= 1.0);
    }
  }
  CHECK(saw_z);
}

TEST_CASE("the dirichlet suite responds to the seed") {
  const auto a = verify::suite_dirichlet(1, 50000);
  const auto b = verify::suite_dirichlet(2, 50000);
  bool any_different = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].observed != b[i].observed) any_different = true;
  }
  CHECK(any_different);
}

TEST_CASE("the bounds suite passes") {
  check_all_pass(verify::suite_bounds(3, 200000));
}

TEST_CASE("the gradient suite covers all nine presets and passes") {
  const auto checks = verify::suite_gradients(5);
  REQUIRE(checks.size() == variant_table().size());
  std::set<std::string> names;
  for (const Check& c : checks) names.insert(c.name);
  for (const auto& [name, v] : variant_table()) {
    CHECK(names.count("gradcheck_" + name) == 1);
  }
  check_all_pass(checks);
}

TEST_CASE("fd_max_rel_error is tiny for a smooth preset") {
  const edl::Variant* v = find_variant("Softmax");
  REQUIRE(v != nullptr);
  CHECK(verify::fd_max_rel_error(*v, 11, 4) < 1e-4);
}

TEST_CASE("run_suite dispatches by name") {
  CHECK(verify::run_suite("special", 1, 1000).size() == verify::suite_special().size());
  const auto all = verify::run_suite("all", 1, 50000);
  const std::size_t parts = verify::suite_special().size() +
                            verify::suite_dirichlet(1, 50000).size() +
                            verify::suite_bounds(1, 50000).size() +
                            verify::suite_gradients(1).size();
  CHECK(all.size() == parts);
  CHECK_THROWS_AS(verify::run_suite("nonsense", 1, 1000), std::invalid_argument);
}
