#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "criteria.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Acceptance suite"};
  std::string level = "full";
  std::string golden = SHT_GOLDEN_DIR;
  app.add_option("--level", level, "smoke or full")->check(CLI::IsMember({"smoke", "full"}));
  app.add_option("--golden", golden, "directory of golden files");
  CLI11_PARSE(app, argc, argv);

  const auto outcomes =
      acceptance::run_suite(level == "smoke" ? acceptance::Level::smoke : acceptance::Level::full, golden);
  std::size_t failed = 0;
  double seconds = 0.0;
  for (const auto& o : outcomes) {
    std::printf("%s\n", acceptance::format_line(o).c_str());
    std::fflush(stdout);
    if (!o.passed) ++failed;
    seconds += o.seconds;
  }
  std::printf("%zu of %zu passed in %.1f s\n", outcomes.size() - failed, outcomes.size(), seconds);
  return failed == 0 ? 0 : 2;
}
