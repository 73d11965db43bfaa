#include "benchmark/benchmark.h"

// Local entry point: the distro's prebuilt benchmark_main archive carries
// LTO bytecode from a different compiler patch release and cannot be linked.
BENCHMARK_MAIN();
