// SPDX-License-Identifier: Apache-2.0
// Runs the acceptance criteria and prints one PASS/FAIL line for each.
// Usage: shearlab_acceptance [id ...]   (all criteria when no ids are given)
#include "shearlab/acceptance.hpp"
#include "shearlab/errors.hpp"

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv)
{
    using namespace shear;
    std::vector<int> ids;
    for (int i = 1; i < argc; ++i) {
        char* end = nullptr;
        const long id = std::strtol(argv[i], &end, 10);
        if (*end != '\0' || id < 1 || id > criterion_count) {
            std::cerr << "not a criterion id: " << argv[i] << '\n';
            return 1;
        }
        ids.push_back(static_cast<int>(id));
    }
    if (ids.empty())
        for (int id = 1; id <= criterion_count; ++id) ids.push_back(id);

    int failed = 0;
    run_acceptance(ids, AcceptanceOptions{}, [&](const CriterionResult& r) {
        std::cout << result_line(r) << std::endl;
        if (!r.pass) ++failed;
    });
    std::cout << (ids.size() - static_cast<std::size_t>(failed)) << "/" << ids.size() << " criteria passed"
              << std::endl;
    return failed == 0 ? 0 : 1;
}
