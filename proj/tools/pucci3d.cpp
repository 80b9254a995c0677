#include "pucci3d/cli.hpp"

int main(int argc, char** argv) { return pucci3d::run_cli(argc, argv); }
