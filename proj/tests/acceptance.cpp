// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <cstdio>
#include <cstring>

#include "bcft/acceptance.hpp"

int main(int argc, char** argv)
{
    bcft::acceptance::Options o;
    for (int i = 1; i < argc; ++i)
        if (std::strcmp(argv[i], "--parallel") == 0) o.parallel = true;

    const auto results = bcft::acceptance::run_all(o);
    for (const auto& r : results) {
        std::printf("%s %2d %-20s %6.2fs  %s\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds,
            r.details.dump().c_str());
    }
    int failed = 0;
    for (const auto& r : results) failed += !r.passed;
    std::printf("%d/%zu criteria passed\n", static_cast<int>(results.size()) - failed, results.size());
    return failed ? 1 : 0;
}
