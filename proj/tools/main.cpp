#include "cli.hpp"

int main(int argc, char** argv) { return pedx::run_cli(argc, argv); }
