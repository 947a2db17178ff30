#include "app/cli.hpp"

int main(int argc, char** argv) { return psocp::app::run_cli(argc, argv); }
