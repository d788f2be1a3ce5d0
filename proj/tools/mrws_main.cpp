#include "mrws/cli.hpp"

int main(int argc, char** argv) { return mrws::run_cli(argc, argv); }
