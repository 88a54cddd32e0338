#include <cstring>
#include <iostream>

#include "nilflow/acceptance.hpp"

int main(int argc, char** argv) {
    nilflow::AcceptanceOptions opts;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--quick") == 0) opts.quick = true;
        else opts.only.push_back(std::atoi(argv[i]));
    }
    int failed = 0;
    nilflow::run_acceptance(opts, [&](const nilflow::CriterionResult& r) {
        std::cout << r.line() << std::endl;
        failed += !r.pass;
    });
    std::cout << (failed ? "FAILED " : "ALL PASSED ") << failed << " failing criteria" << std::endl;
    return failed ? 1 : 0;
}
