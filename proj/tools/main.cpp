#include <vector>

#include "gas/cli.hpp"

int main(int argc, char** argv) {
  return gas::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
