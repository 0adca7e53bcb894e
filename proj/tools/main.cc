#include <string>
#include <vector>

#include "twinlight/cli/commands.h"

int main(int argc, char** argv) {
  return twinlight::RunCli(std::vector<std::string>(argv + 1, argv + argc));
}
