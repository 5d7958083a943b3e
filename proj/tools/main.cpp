#include "idlab/cli.hpp"

int main(int argc, char** argv) { return idlab::cli::run(argc, argv); }
