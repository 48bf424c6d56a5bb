#include <string>
#include <vector>

#include "skillgraph/cli.hpp"

int main(int argc, char** argv) {
  return skillgraph::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
