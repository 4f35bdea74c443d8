#include <netflow/cli.hpp>

int main(int argc, char** argv) { return netflow::run_cli(argc, argv); }
