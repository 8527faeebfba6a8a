#include "cli.hpp"

int main(int argc, char** argv) { return subsetforge::cli::run(argc, argv); }
