#pragma once

#include <string>
#include <vector>

#include "hopu/frontend.hpp"

namespace hopu {

struct BenchResult {
    std::string name;
    size_t runs = 0;
    size_t answers = 0;  // runs that produced their expected answer
    double seconds = 0;
};

const std::vector<std::string>& bench_names();

// Throws Error on an unknown name. runs = 0 picks the default workload size.
BenchResult run_bench(const std::string& name, TypeOpt level, size_t runs = 0);

}  // namespace hopu
