#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "qsde/errors.hpp"

namespace {

struct Flags {
  std::string instance;
  std::string out;
  std::string slots;
  qsde::cli::Options options;
};

void add_common(CLI::App* command, Flags& flags) {
  auto& o = flags.options;
  command->add_option("--instance", flags.instance, "Instance JSON file")->required();
  command->add_option("--engine", o.engine, "semigroup, guichardet or toyfock")
      ->capture_default_str();
  command->add_option("--t", o.t, "Time horizon (default: instance defaults.t)");
  command->add_option("--gprime", o.g_prime, "Named step function g'");
  command->add_option("--g", o.g, "Named step function g");
  command->add_option("--truncation", o.truncation, "Guichardet truncation level N");
  command->add_option("--slots", flags.slots,
                      "Toy Fock slot count (converge: comma-separated ascending list)");
  command->add_option("--tol", o.tol, "Replace the fixed tolerances of all checks");
  command->add_option("--seed", o.seed, "Seed for random perturbations and split points");
  command->add_option("--out", flags.out, "Write the JSON result here instead of stdout");
  command->add_flag("!--no-timing", o.timing, "Report runtime_ms as 0");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Matrix-element solvers and verification suites for QSDEs"};
  app.require_subcommand(1);
  Flags flags;
  for (const char* name : {"solve", "verify", "reconstruct", "converge", "coalg"}) {
    auto* command = app.add_subcommand(name);
    add_common(command, flags);
    if (std::string(name) == "verify") {
      command->add_option("--suite", flags.options.suite,
                          "all, cocycle, conjugate, lifting, bounds, weak or coalg")
          ->capture_default_str();
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : qsde::cli::kConfigError;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  qsde::cli::Outcome outcome;
  try {
    if (!flags.slots.empty()) flags.options.slots = qsde::cli::parse_slot_list(flags.slots);
    if (command != "converge" && flags.options.slots.size() > 1) {
      throw qsde::cli::SchemaError("--slots takes a single value for " + command);
    }
    const auto instance = qsde::cli::parse_instance_file(flags.instance);
    outcome = qsde::cli::run(command, instance, flags.options);
  } catch (const qsde::Error& e) {
    outcome = {{{"command", command}, {"error", e.what()},
                {"exit_code", int{qsde::cli::kConfigError}}},
               qsde::cli::kConfigError};
  }

  if (outcome.document.contains("error")) {
    std::cerr << "qsde " << command << ": " << outcome.document["error"].get<std::string>()
              << "\n";
  }
  const std::string text = outcome.document.dump(2) + "\n";
  if (flags.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream file(flags.out);
    if (!file) {
      std::cerr << "qsde: cannot write " << flags.out << "\n";
      return qsde::cli::kConfigError;
    }
    file << text;
  }
  return outcome.exit_code;
}
