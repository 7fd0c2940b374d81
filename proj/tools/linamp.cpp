#include "linamp/cli.hpp"

int main(int argc, char** argv) { return linamp::cli::run(argc, argv); }
