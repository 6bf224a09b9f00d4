#include "eisenhart/cli.hpp"

int main(int argc, char** argv) { return eisenhart::run_cli(argc, argv); }
