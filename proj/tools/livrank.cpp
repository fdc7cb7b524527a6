#include "livrank/cli.hpp"

int main(int argc, char** argv) { return livrank::cli::run(argc, argv); }
