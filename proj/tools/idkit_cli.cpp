// idkit: run experiment configs, verification pairs, or print the config schema.
//
// Exit codes: 0 success, 1 verification failed, 2 invalid config or arguments,
// 3 computation refused, 4 I/O or internal error.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "idkit/experiment.hpp"

namespace {

enum Exit { kOk = 0, kVerifyFailed = 1, kInvalid = 2, kRefused = 3, kInternal = 4 };

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format;
  std::optional<unsigned> threads;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw idkit::ValidationError("", "cannot read config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string output_path(const idkit::ExperimentConfig& c, const Options& o, const std::string& format) {
  if (!o.out.empty()) return o.out;
  if (!c.out_path.empty()) return c.out_path;
  if (const char* dir = std::getenv("IDKIT_OUTPUT_DIR"); dir && *dir) {
    std::filesystem::create_directories(dir);
    const std::string name = c.is_verification() ? c.pair : c.kind;
    return (std::filesystem::path(dir) / (name + "." + format)).string();
  }
  return {};
}

int execute(const Options& o, bool verification_only) {
  idkit::ExperimentConfig c = idkit::parse_config_text(read_file(o.config));
  if (o.seed) c.seed = *o.seed;
  if (o.threads) c.threads = *o.threads;
  const std::string format = o.format.empty() ? c.format : o.format;

  const auto start = std::chrono::steady_clock::now();
  const idkit::RunOutput out = verification_only ? idkit::verify(c) : idkit::run(c);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::ostringstream text;
  if (format == "csv") out.table.write_csv(text);
  else text << idkit::result_record(c, out, seconds).dump(2) << '\n';

  const std::string path = output_path(c, o, format);
  if (path.empty()) {
    std::cout << text.str();
  } else {
    std::ofstream file(path);
    if (!file) {
      std::cerr << "error: cannot write " << path << '\n';
      return kInternal;
    }
    file << text.str();
  }
  if (c.is_verification()) std::cerr << c.pair << ": " << (out.passed ? "pass" : "FAIL") << '\n';
  return out.passed ? kOk : kVerifyFailed;
}

void add_run_options(CLI::App& app, Options& o) {
  app.add_option("--config", o.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  app.add_option("--seed", o.seed, "seed, overrides the config's");
  app.add_option("--out", o.out, "output file (default: config output.path, $IDKIT_OUTPUT_DIR, or stdout)");
  app.add_option("--format", o.format, "output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--threads", o.threads, "Monte Carlo worker threads")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"idkit: identification and sample-complexity experiments"};
  app.set_version_flag("--version", std::string(idkit::kVersion));
  app.require_subcommand(1);
  Options opts;
  auto* run = app.add_subcommand("run", "run an experiment or verification config");
  add_run_options(*run, opts);
  auto* verify = app.add_subcommand("verify", "run an analytic-versus-oracle pair; exit 1 on failure");
  add_run_options(*verify, opts);
  app.add_subcommand("schema", "print the config schema");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (app.got_subcommand("schema")) {
      std::cout << idkit::emit_schema();
      return kOk;
    }
    return execute(opts, app.got_subcommand("verify"));
  } catch (const idkit::ValidationError& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return kInvalid;
  } catch (const idkit::RefusalError& e) {
    std::cerr << "refused: " << e.what() << '\n';
    return kRefused;
  } catch (const idkit::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
}
