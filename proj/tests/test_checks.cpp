// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "cpgcl/checks.hpp"
#include "cpgcl/errors.hpp"

using namespace cpgcl;

// Reduced-size runs of the randomized cross-validation suites; the
// acceptance binary runs them at full size.

TEST_CASE("cross-engine suites hold on sampled programs") {
    for (const auto& name : check_names()) {
        std::size_t n = name == "roundtrip" ? 100 : 40;
        CheckResult r = run_check(name, 0x5EED0000 + n, n);
        INFO(r.summary());
        CHECK(r.pass());
    }
}

TEST_CASE("unknown property names are rejected") {
    CHECK_THROWS_AS(run_check("no-such-suite", 1, 1), ParameterError);
}
