#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fraclab/commands.hpp"
#include "fraclab/version.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<std::string> out;
  std::optional<double> margin;
  std::optional<double> h;
  std::optional<int> threads;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->set_help_flag("--help", "print this help");  // -h would clash with --h
  cmd->add_option("--config", o.config, "JSON run configuration")->required();
  cmd->add_option("--out", o.out, "output directory (overrides output_dir)");
  cmd->add_option("--margin", o.margin, "box margin in units of diam(Omega), >= 1");
  cmd->add_option("--h", o.h, "lattice spacing");
  cmd->add_option("--threads", o.threads, "OpenMP threads")->check(CLI::PositiveNumber);
}

fraclab::RunConfig effective(const Overrides& o) {
  fraclab::RunConfig cfg = fraclab::load_config(o.config);
  if (o.out) cfg.output_dir = *o.out;
  if (o.margin) {
    if (!(*o.margin >= 1.0)) throw fraclab::ConfigError("--margin must be >= 1");
    cfg.margin = *o.margin;
  }
  if (o.h) {
    if (!(*o.h > 0.0)) throw fraclab::ConfigError("--h must be positive");
    cfg.h = *o.h;
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fractional p-Rayleigh quotients and infinity-eigenvalue residuals"};
  app.set_version_flag("--version", std::string(fraclab::kVersion));
  app.require_subcommand(1);

  Overrides o;
  using Fn = fraclab::RunReport (*)(const fraclab::RunConfig&);
  Fn fn = nullptr;
  const std::pair<const char*, const char*> names[] = {
      {"eig", "first eigenpair for one p (with the p = 2 oracle when p == 2)"},
      {"sweep", "p-sweep of lambda_p^(1/p) against R^(-alpha)"},
      {"infinity", "representation formula and infinity-equation residuals"},
      {"verify1d", "closed-form 1D examples on (0, 2)"},
  };
  const Fn fns[] = {fraclab::cmd_eig, fraclab::cmd_sweep, fraclab::cmd_infinity,
                    fraclab::cmd_verify1d};
  for (int i = 0; i < 4; ++i) {
    CLI::App* cmd = app.add_subcommand(names[i].first, names[i].second);
    add_common(cmd, o);
    cmd->callback([&fn, f = fns[i]] { fn = f; });
  }

  CLI11_PARSE(app, argc, argv);

  try {
#ifdef _OPENMP
    if (o.threads) omp_set_num_threads(*o.threads);
#endif
    const fraclab::RunConfig cfg = effective(o);
    fraclab::RunReport rep = fn(cfg);
    fraclab::write_report(rep, cfg);
    std::cout << rep.summary.dump(2) << '\n';
  } catch (const fraclab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
