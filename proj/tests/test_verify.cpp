#include <doctest.h>

#include "channel.hpp"
#include "verify.hpp"

using namespace qkdrot;

TEST_CASE("all suites pass on a correct build") {
  VerifyOptions opts;
  opts.trials = 20;
  for (const auto& s : run_verify(opts)) {
    INFO(s.name << " max deviation " << s.max_deviation << " " << s.failure);
    CHECK(s.passed);
    CHECK(s.failure.empty());
  }
}

TEST_CASE("verify channels are reproducible") {
  const KrausChannel a = verify_channel(7, 3);
  const KrausChannel b = verify_channel(7, 3);
  REQUIRE(a.operators().size() == 4);
  for (std::size_t j = 0; j < 4; ++j) CHECK(a.operators()[j] == b.operators()[j]);
}

TEST_CASE("a sign error in sigma_y is caught by oracle equivalence") {
  // Flip one off-diagonal entry: [[0, -i], [-i, 0]] is no longer Hermitian,
  // so the decomposition assigns wrong weights. A global sign flip would be
  // invisible since only |a_y|^2 enters.
  PauliBasis broken = PauliBasis::standard();
  broken.y(1, 0) = -broken.y(1, 0);
  VerifyOptions opts;
  opts.trials = 10;
  opts.basis = &broken;
  const SuiteResult r = verify_oracle_equivalence(opts);
  CHECK_FALSE(r.passed);
  CHECK(r.max_deviation > 1e-3);
  CHECK(r.failure.find("channel=") != std::string::npos);
  CHECK(r.failure.find("M=") != std::string::npos);

  opts.basis = nullptr;
  CHECK(verify_oracle_equivalence(opts).passed);
}
