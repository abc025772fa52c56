#include "qmuse/cli.hpp"

int main(int argc, char** argv) { return qmuse::cli::run(argc, argv); }
