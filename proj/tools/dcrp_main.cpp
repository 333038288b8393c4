#include "dcrp/cli.hpp"

int main(int argc, char** argv) { return dcrp::run_cli(argc, argv); }
