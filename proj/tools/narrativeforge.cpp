#include "narrativeforge/cli.hpp"

int main(int argc, char** argv) { return narrativeforge::run_cli(argc, argv); }
