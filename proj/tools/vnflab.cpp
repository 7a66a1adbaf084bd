#include "vnflab/bench/cli.hpp"

int main(int argc, char** argv) { return vnflab::bench::run_cli(argc, argv); }
