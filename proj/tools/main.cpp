#include <csignal>
#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
  // A black-box model that exits early must not kill us through SIGPIPE.
  std::signal(SIGPIPE, SIG_IGN);
  return scfault::run_cli(argc, argv, std::cout, std::cerr);
}
