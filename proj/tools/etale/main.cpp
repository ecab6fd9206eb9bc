#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "etale/error.hpp"
#include "etale/io.hpp"

namespace {

using etale::cli::ojson;

// Values from --config, overridden by flags given on the command line.
void apply_config(const std::string& path, etale::cli::Options& o, const CLI::App& app) {
  const auto j = ojson::parse(etale::read_text_file(path), nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw etale::Error(etale::ErrorKind::ParseError, "config: not a JSON object");
  for (const auto& [k, v] : j.items()) {
    const bool given = k != "format_version" && app.get_option_no_throw("--" + k) && app.count("--" + k) > 0;
    if (k == "format_version") {
      if (v != etale::kFormatVersion) throw etale::Error(etale::ErrorKind::MalformedSpec, "config: unsupported version");
    } else if (k == "depth" && v.is_number_unsigned()) {
      if (!given) o.depth = v.get<std::size_t>();
    } else if (k == "truncation" && v.is_number_unsigned()) {
      if (!given) o.truncation = v.get<std::size_t>();
    } else if (k == "samples" && v.is_number_unsigned()) {
      if (!given) o.samples = v.get<std::size_t>();
    } else if (k == "seed" && v.is_number_unsigned()) {
      if (!given) o.seed = v.get<std::uint64_t>();
    } else if (k == "tol" && v.is_number()) {
      if (!given) o.tol = v.get<double>();
    } else {
      throw etale::Error(etale::ErrorKind::MalformedSpec, "config: unknown or mistyped field '" + k + "'");
    }
  }
  if (!j.contains("format_version")) throw etale::Error(etale::ErrorKind::MalformedSpec, "config: missing format_version");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Twisted etale groupoid algebras: convolution, norms, block structure and C*-uniqueness certificates"};
  etale::cli::Options o;
  std::string config;
  app.add_option("command", o.command, "validate | conv | involve | norm | reduced-norm | decompose | principal | analyze")
      ->required()
      ->check(CLI::IsMember(
          {"validate", "conv", "involve", "norm", "reduced-norm", "decompose", "principal", "analyze"}));
  app.add_option("--model", o.model, "groupoid spec file");
  app.add_option("--cocycle", o.cocycle, "cocycle spec file (default: trivial)");
  app.add_option("--element", o.elements, "element file (repeatable)");
  app.add_option("--depth", o.depth, "interior-test and cocycle-check depth")->check(CLI::PositiveNumber);
  app.add_option("--truncation", o.truncation, "fiber truncation size")->check(CLI::PositiveNumber);
  app.add_option("--tol", o.tol, "operator-norm tolerance")->check(CLI::PositiveNumber);
  app.add_option("--samples", o.samples, "units sampled for norm estimates (0: all of a finite unit space)");
  app.add_option("--seed", o.seed, "random seed");
  app.add_option("--output", o.output, "output format")->check(CLI::IsMember({"text", "json"}));
  app.add_option("--config", config, "analysis config file (depth, truncation, tol, samples, seed)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return etale::cli::kInput;
  }

  const bool json = o.output == "json";
  try {
    if (!config.empty()) apply_config(config, o, app);
    auto report = etale::cli::run_command(o);
    if (json) {
      std::cout << report.data.dump(2) << "\n";
    } else {
      for (const auto& l : report.text) std::cout << l << "\n";
    }
    return report.exit_code;
  } catch (const etale::Error& e) {
    const int code = e.kind() == etale::ErrorKind::ParseError ? etale::cli::kInput : etale::cli::kValidation;
    if (json) {
      ojson err;
      err["format_version"] = etale::kFormatVersion;
      err["command"] = o.command;
      err["error"]["kind"] = std::string(etale::to_string(e.kind()));
      err["error"]["message"] = e.what();
      if (!e.witness().empty()) err["error"]["witness"] = e.witness();
      std::cout << err.dump(2) << "\n";
    } else {
      std::cerr << "error (" << etale::to_string(e.kind()) << "): " << e.what() << "\n";
      if (!e.witness().empty()) std::cerr << "witness: " << e.witness() << "\n";
    }
    return code;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return etale::cli::kInternal;
  }
}
