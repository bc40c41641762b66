#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "CLI11.hpp"
#include "occ/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"occ: open closure types interpreter"};
  occ::CliOptions opts;
  std::string file;
  std::string expr;
  auto* file_opt = app.add_option("file", file, "program file (stdin when omitted)");
  app.add_option("-e,--expr", expr, "program text")->excludes(file_opt);
  app.add_flag("--typing-derivation", opts.typing_derivation, "print the typing derivation");
  app.add_flag("--reduction-derivation", opts.reduction_derivation, "print the reduction derivation");
  app.add_flag("--check-noninterference", opts.check_noninterference, "enumerate valuation pairs and check");
  app.add_flag("--classic", opts.classic, "evaluate with environment-capturing closures");
  app.add_flag("--ascii", opts.ascii, "ASCII output");
  app.add_flag("--strict", opts.strict, "reject free variables instead of auto-binding them");
  app.add_option("--max-steps", opts.max_steps, "evaluation budget in rule applications");
  app.add_option("--report-format", opts.report_format, "non-interference report format")
      ->check(CLI::IsMember({"text", "json"}));
  CLI11_PARSE(app, argc, argv);

  std::string src;
  if (!expr.empty()) {
    src = expr;
  } else if (!file.empty()) {
    std::ifstream in(file);
    if (!in) {
      std::cerr << "error: cannot open " << file << "\n";
      return occ::kExitError;
    }
    src.assign(std::istreambuf_iterator<char>(in), {});
  } else {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    src = ss.str();
  }

  occ::CliOutcome r = occ::run(opts, src);
  std::cout << r.out;
  std::cerr << r.err;
  return r.exit_code;
}
