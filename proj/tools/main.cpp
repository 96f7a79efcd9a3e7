#include "vectorgas/cli.hpp"

int main(int argc, char** argv) { return vectorgas::run_command(argc, argv); }
