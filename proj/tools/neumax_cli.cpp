#include "neumax/cli.hpp"

int main(int argc, char** argv) { return neumax::cli::run(argc, argv); }
