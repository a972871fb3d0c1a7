#include "fblab/run.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <sstream>

int main(int argc, char** argv)
{
  CLI::App app{"fblab: coupled obstacle system solver and free-boundary analysis"};
  std::string command, config_path, out_dir;
  bool sequential = false;
  app.add_option("command", command, "solve | sweep-lambda | classify | audit | oracle-check")->required();
  app.add_option("--config", config_path, "configuration file")->required();
  app.add_option("--out", out_dir, "output directory (overrides output.dir)");
  app.add_flag("--sequential", sequential, "single-threaded, deterministic execution (the only mode)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : fblab::exit_code(fblab::ErrorKind::config);
  }

  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "fblab: config error: cannot read '" << config_path << "'\n";
    return fblab::exit_code(fblab::ErrorKind::config);
  }
  std::stringstream text;
  text << in.rdbuf();
  try {
    fblab::RunConfig cfg = fblab::parse_config(text.str());
    if (cfg.command != command)
      fblab::fail(fblab::ErrorKind::config,
                  "command '" + command + "' does not match the config's command '" + cfg.command + "'");
    return fblab::run(cfg, out_dir);
  } catch (const fblab::Error& e) {
    std::cerr << "fblab: " << fblab::to_string(e.kind()) << " error: " << e.what() << '\n';
    return fblab::exit_code(e.kind());
  }
}
