#include <doctest.h>

#include <array>
#include <cmath>
#include <set>

#include "imvol/rng.hpp"

using namespace imvol;

TEST_SUITE("rng") {
    TEST_CASE("equal seeds give equal streams") {
        Rng a(123), b(123), c(124);
        bool same = true, different = false;
        for (int i = 0; i < 100; ++i) {
            const double ua = a.uniform();
            const double ub = b.uniform();
            same = same && ua == ub;
            different = different || ua != c.uniform();
        }
        CHECK(same);
        CHECK(different);
    }

    TEST_CASE("uniform stays in range") {
        Rng rng(9);
        for (int i = 0; i < 10000; ++i) {
            const double u = rng.uniform();
            CHECK(u >= 0.0);
            CHECK(u < 1.0);
            const double v = rng.uniform(-3.0, 7.0);
            CHECK(v >= -3.0);
            CHECK(v < 7.0);
        }
    }

    TEST_CASE("normal has roughly standard moments") {
        Rng rng(10);
        const int n = 200000;
        double sum = 0.0, sum_sq = 0.0;
        for (int i = 0; i < n; ++i) {
            const double z = rng.normal();
            sum += z;
            sum_sq += z * z;
        }
        const double mean = sum / n;
        const double var = sum_sq / n - mean * mean;
        CHECK(std::abs(mean) < 0.01);
        CHECK(std::abs(var - 1.0) < 0.02);
    }

    TEST_CASE("index covers the range uniformly enough") {
        Rng rng(11);
        std::array<int, 5> counts{};
        for (int i = 0; i < 50000; ++i) counts[rng.index(5)]++;
        for (int c : counts) {
            CHECK(c > 9000);
            CHECK(c < 11000);
        }
    }

    TEST_CASE("derive separates streams") {
        std::set<std::uint64_t> seen;
        for (std::uint64_t seed : {1ull, 2ull, 42ull}) {
            for (std::uint64_t stream = 0; stream < 8; ++stream) {
                seen.insert(Rng::derive(seed, stream));
            }
        }
        CHECK(seen.size() == 24);  // no collisions across (seed, stream)
        CHECK(Rng::derive(7, 3) == Rng::derive(7, 3));
    }
}
