#include <iostream>
#include <string>
#include <vector>

#include "advalstm/cli/commands.hpp"

int main(int argc, char** argv) {
  return advalstm::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
