#include "cli.hpp"

int main(int argc, char** argv) { return advscore::cli::run(argc, argv); }
