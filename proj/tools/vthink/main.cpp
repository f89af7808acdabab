#include <iostream>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "vthink/cli.hpp"

int main(int argc, char** argv) {
  spdlog::set_pattern("[%l] %v");
  if (const char* level = std::getenv("VTHINK_LOG")) spdlog::set_level(spdlog::level::from_str(level));

  std::vector<std::string> args(argv + 1, argv + argc);
  vthink::cli::CommandContext ctx;
  ctx.out = &std::cout;
  return vthink::cli::run_cli(args, ctx, std::cerr);
}
