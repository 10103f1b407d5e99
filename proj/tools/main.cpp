#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "cli.hpp"

#ifndef NORI_DEFAULT_CORPUS
#define NORI_DEFAULT_CORPUS "corpus/nori.json"
#endif

int main(int argc, char** argv) {
  using namespace nori::cli;
  CLI::App app{"nori: exact homology of pairs and diagram coalgebras"};
  Options opts;
  opts.corpus = NORI_DEFAULT_CORPUS;
  std::string ring;

  std::vector<std::string> commands = command_names();
  commands.push_back("all");
  app.add_option("command", opts.command, "command to run, or 'all'")->required()->check(CLI::IsMember(commands));
  app.add_option("--corpus", opts.corpus, "corpus file")->capture_default_str();
  app.add_option("--ring", ring, "coefficients, z or q")->check(CLI::IsMember({"z", "q", "Z", "Q"}));
  app.add_option("--out", opts.out, "write the JSON certificate here");
  app.add_option("--budget", opts.budget, "candidate budget for very-good-search")->capture_default_str();
  app.add_option("--depth", opts.depth, "depth for sigma-system (default: chain length - 1)");
  app.add_option("--only", opts.only, "run a single corpus entry");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInvalidInput;
  }
  if (!ring.empty()) opts.ring = nori::parse_ring(ring);

  RunResult r = run(opts);
  std::cout << r.table;
  if (opts.out) {
    std::ofstream out(*opts.out, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write " << *opts.out << "\n";
      return kInvalidInput;
    }
    out << certificate_text(r.certificate);
  }
  return r.exit_code;
}
