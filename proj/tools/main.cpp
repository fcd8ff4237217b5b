#include "shiftqp/cli.hpp"

int main(int argc, char** argv) { return shiftqp::run_cli(argc, argv); }
