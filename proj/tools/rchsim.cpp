#include "rch/run.hpp"

int main(int argc, char** argv) { return rch::run_cli(argc, argv); }
