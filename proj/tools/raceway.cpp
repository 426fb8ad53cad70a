#include "raceway/cli.hpp"

int main(int argc, char** argv) {
  return raceway::run_command(std::vector<std::string>(argv + 1, argv + argc));
}
