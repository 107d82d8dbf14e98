#include <string>
#include <vector>

#include "stroobnet/pipeline.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return stroobnet::cli::run_pipeline(args);
}
