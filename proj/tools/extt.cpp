#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "extt/driver.hpp"

int main(int argc, char** argv) {
  CLI::App app{"extt - a small type checker with extension types, controlled "
               "unfolding and record patching"};
  app.require_subcommand(1);

  auto* check = app.add_subcommand("check", "check a source file");
  std::string file;
  extt::Options opt;
  check->add_option("file", file, "source file (.ett)")->required();
  check->add_option("--normalize", opt.normalize_name,
                    "print the normal form of this definition's reference");
  check->add_option("--assume", opt.assume, "atoms assumed true, comma separated")
      ->delimiter(',');
  check->add_flag("--print-core", opt.print_core, "print elaborated core terms");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // usage errors are distinct from type errors
  }

  return extt::run_check(file, opt, std::cout, std::cerr);
}
