#include "gcas/cli.hpp"

int main(int argc, char** argv) { return gcas::cli::run(argc, argv); }
