#include "polyvem/acceptance.hpp"

#include <cstdlib>
#include <iostream>

int main()
{
    int threads = 1;
    if (const char* env = std::getenv("POLYVEM_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0)
            threads = n;
    }
    const int failed = polyvem::acceptance::run_and_report(std::cout, threads);
    if (failed > 0)
        std::cout << failed << " criteria FAILED\n";
    else
        std::cout << "all criteria passed\n";
    return failed == 0 ? 0 : 1;
}
