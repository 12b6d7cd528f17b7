#include <bpd/harness/cli.hpp>

int main(int argc, char** argv) { return bpd::harness::cli_main(argc, argv); }
