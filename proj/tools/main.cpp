#include "zdalab/scenario.hpp"

int main(int argc, char** argv) { return zdalab::cli_main(argc, argv); }
