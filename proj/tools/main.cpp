#include "cli.hpp"

int main(int argc, char** argv) { return hyperdyn::cli::main_entry(argc, argv); }
