#include "cli.hpp"

int main(int argc, char** argv) { return harmonious::cli::main(argc, argv); }
