#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "fracsing/error.hpp"
#include "manifest.hpp"
#include "settings.hpp"

using namespace fracsing;
using namespace fracsing::cli;

namespace {

int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::DimensionTooSmall:
    case ErrorCode::SigmaOutOfRange:
    case ErrorCode::PBelowSerrin:
    case ErrorCode::PSupercritical:
    case ErrorCode::InvalidGeometry:
    case ErrorCode::InvalidArgument:
    case ErrorCode::KOutOfRange:
    case ErrorCode::BetaOutOfRange:
    case ErrorCode::Io:
      return kBadInput;
    case ErrorCode::NewtonDivergence:
    case ErrorCode::NegativeIterate:
      return kSolverFailed;
    default:
      return kVerifyFailed;
  }
}

struct Bound {
  std::map<std::string, CLI::Option*> opts;
  std::string mesh = "128x64";
  std::string config;
};

void add_common(CLI::App* sub, Settings& s, Bound& b) {
  b.opts["n"] = sub->add_option("-n,--dim", s.n, "dimension n >= 2");
  b.opts["sigma"] = sub->add_option("-s,--sigma", s.sigma, "fractional order, 0 < sigma < 1");
  b.opts["p"] = sub->add_option("-p,--exponent", s.p, "nonlinearity exponent");
  b.opts["mesh"] = sub->add_option("--mesh", b.mesh, "solver mesh NXIxNETA, e.g. 256x128");
  b.opts["quad_order"] = sub->add_option("--quad-order", s.quad_order, "angular rule order");
  b.opts["tol"] = sub->add_option("--tol", s.tol, "numerical tolerance of the main routine");
  b.opts["out_dir"] = sub->add_option("--out-dir", s.out_dir, "output directory (default $FRACSING_OUT or .)");
  b.opts["with_oracle"] = sub->add_flag("--with-oracle", s.with_oracle, "also run the principal-value oracle");
  sub->add_option("--config", b.config, "JSON file of defaults; flags override it");
}

void parse_mesh(const std::string& text, Settings& s) {
  int a = 0, c = 0;
  char x = 0;
  std::istringstream in(text);
  if (!(in >> a >> x >> c) || (x != 'x' && x != 'X') || !in.eof() || a < 8 || c < 4) {
    throw Error(ErrorCode::InvalidArgument, "--mesh expects NXIxNETA with NXI >= 8, NETA >= 4, got '" + text + "'");
  }
  s.n_xi = a;
  s.n_eta = c;
}

// Config keys fill whatever the command line left unset.
void apply_config(Settings& s, Bound& b) {
  if (b.config.empty()) return;
  std::ifstream in(b.config);
  if (!in) throw Error(ErrorCode::Io, "cannot read config " + b.config);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, "config " + b.config + ": " + e.what());
  }
  auto unset = [&](const char* key) {
    auto it = b.opts.find(key);
    return j.contains(key) && (it == b.opts.end() || it->second->count() == 0);
  };
  try {
    if (unset("n")) s.n = j["n"].get<int>();
    if (unset("sigma")) s.sigma = j["sigma"].get<double>();
    if (unset("p")) s.p = j["p"].get<double>();
    if (unset("mesh")) b.mesh = j["mesh"].get<std::string>();
    if (unset("quad_order")) s.quad_order = j["quad_order"].get<int>();
    if (unset("tol")) s.tol = j["tol"].get<double>();
    if (unset("out_dir")) s.out_dir = j["out_dir"].get<std::string>();
    if (unset("with_oracle")) s.with_oracle = j["with_oracle"].get<bool>();
    if (unset("inner_r")) s.inner_r = j["inner_r"].get<double>();
    if (unset("outer_r")) s.outer_r = j["outer_r"].get<double>();
    if (unset("perturbation")) s.perturbation = j["perturbation"].get<double>();
    if (unset("energy_samples")) s.energy_samples = j["energy_samples"].get<int>();
    if (unset("suites")) s.suites = j["suites"].get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, "config " + b.config + ": " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fracsing: singular solutions of (-Delta)^s u = u^p, checked numerically"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);

  Settings s;
  Bound bc, bv, bs;

  auto* constant = app.add_subcommand("constant", "asymptotic constant and derived exponents");
  add_common(constant, s, bc);

  auto* verify = app.add_subcommand("verify", "run verification suites");
  add_common(verify, s, bv);
  bv.opts["suites"] = verify->add_option("suites", s.suites, "pde energy kelvin moving-sphere blowup scaling (default: all)")
                          ->check(CLI::IsMember({"pde", "energy", "kelvin", "moving-sphere", "blowup", "scaling"}));

  auto* solve = app.add_subcommand("solve", "nonlinear annulus solve plus energy curve");
  add_common(solve, s, bs);
  bs.opts["inner_r"] = solve->add_option("--inner-r", s.inner_r, "inner radius");
  bs.opts["outer_r"] = solve->add_option("--outer-r", s.outer_r, "outer radius");
  bs.opts["perturbation"] =
      solve->add_option("--perturbation", s.perturbation, "boundary data = (1 - perturbation) x exact");
  bs.opts["energy_samples"] = solve->add_option("--energy-samples", s.energy_samples, "radii on the energy curve");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kBadInput;
  }

  Bound& b = constant->parsed() ? bc : verify->parsed() ? bv : bs;
  try {
    apply_config(s, b);
    parse_mesh(b.mesh, s);
    if (s.out_dir.empty()) {
      const char* env = std::getenv("FRACSING_OUT");
      s.out_dir = (env && *env) ? env : ".";
    }
    std::filesystem::create_directories(s.out_dir);
    if (constant->parsed()) return cmd_constant(s);
    if (verify->parsed()) return cmd_verify(s);
    return cmd_solve(s);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadInput;
  }
}
