#include "barriermc/cli.hpp"

int main(int argc, char** argv) { return barriermc::run(argc, argv); }
