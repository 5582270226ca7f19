// Command-line front door. Talks to the engines only through the C API;
// its own work is file I/O, flag parsing, and report assembly.
//
// Exit codes: 0 success (claims hold), 1 claims violated, 2 input error,
// 3 internal invariant breach, 4 budget exceeded.

#include <CLI11.hpp>
#include <json.hpp>

#include <frtk.h>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

using Json = nlohmann::json;

namespace {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Frees C API strings on every path.
struct CStr {
  char* p = nullptr;
  ~CStr() { frtk_string_free(p); }
};

struct Timer {
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();
  double lap() {
    auto now = std::chrono::steady_clock::now();
    double ms = std::chrono::duration<double, std::milli>(now - start).count();
    start = now;
    return ms;
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("short write to " + path);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

int fail(const std::string& command, frtk_status status) {
  std::fprintf(stderr, "frtk: %s: %s\n", command.c_str(), frtk_last_error());
  return static_cast<int>(status);
}

Json envelope(const std::string& command, Json config, Json result,
              Json timings) {
  return Json{{"command", command},
              {"config", std::move(config)},
              {"result", std::move(result)},
              {"timings_ms", std::move(timings)},
              {"version", frtk_version()}};
}

// Analysis commands: -o redirects the report itself.
int emit_report(const Json& report, const std::string& out_path) {
  if (out_path.empty())
    std::cout << dump(report);
  else
    write_file(out_path, dump(report));
  return 0;
}

// Generator commands: -o receives the bare artifact so it can be fed back
// into the verify/lowrank commands; the report always goes to stdout.
int emit_artifact(const Json& report, const Json& artifact,
                  const std::string& out_path) {
  if (!out_path.empty()) write_file(out_path, dump(artifact));
  std::cout << dump(report);
  return 0;
}

struct Options {
  std::string input;
  std::string sequence;
  std::string output;
  bool brute = false;
  long long seed = 0;
  long long budget = 1 << 20;
  int jobs = 1;
  double eig_tol = 1e-10;
  double rank_tol = 1e-8;
  double res_tol = 1e-8;
  std::vector<int> ranks{1};
  std::vector<int> assign;
  int worst_case = 0;
  int order = 0;  // positional N of `sdp worst-case`
};

int run_lp_analyze(const Options& o) {
  Timer t;
  frtk_lp* lp = nullptr;
  const std::string text = read_file(o.input);
  if (frtk_status st = frtk_lp_from_json(text.c_str(), &lp))
    return fail("lp analyze", st);
  const double load_ms = t.lap();

  const Json opts{{"brute", o.brute}, {"seed", o.seed}};
  CStr res;
  frtk_status st = frtk_lp_analyze(lp, opts.dump().c_str(), &res.p);
  frtk_lp_free(lp);
  if (st != FRTK_OK && st != FRTK_CLAIM_VIOLATED)
    return fail("lp analyze", st);
  const double run_ms = t.lap();

  const Json config{{"input", o.input},
                    {"output", o.output},
                    {"brute", o.brute},
                    {"seed", o.seed}};
  emit_report(envelope("lp analyze", config, Json::parse(res.p),
                       {{"load", load_ms}, {"run", run_ms}}),
              o.output);
  if (st == FRTK_CLAIM_VIOLATED) return fail("lp analyze", st);
  return 0;
}

int run_lp_verify(const Options& o) {
  Timer t;
  frtk_lp* lp = nullptr;
  const std::string problem = read_file(o.input);
  const std::string sequence = read_file(o.sequence);
  if (frtk_status st = frtk_lp_from_json(problem.c_str(), &lp))
    return fail("lp verify", st);
  const double load_ms = t.lap();

  CStr res;
  frtk_status st = frtk_lp_verify(lp, sequence.c_str(), &res.p);
  frtk_lp_free(lp);
  if (st != FRTK_OK && st != FRTK_CLAIM_VIOLATED) return fail("lp verify", st);
  const double run_ms = t.lap();

  const Json config{{"input", o.input},
                    {"sequence", o.sequence},
                    {"output", o.output}};
  emit_report(envelope("lp verify", config, Json::parse(res.p),
                       {{"load", load_ms}, {"run", run_ms}}),
              o.output);
  if (st == FRTK_CLAIM_VIOLATED) return fail("lp verify", st);
  return 0;
}

int run_sdp_verify(const Options& o) {
  Timer t;
  frtk_sdp* sdp = nullptr;
  const std::string problem = read_file(o.input);
  const std::string sequence = read_file(o.sequence);
  if (frtk_status st = frtk_sdp_from_json(problem.c_str(), &sdp))
    return fail("sdp verify", st);
  const double load_ms = t.lap();

  const Json opts{{"rank_tol", o.rank_tol}};
  CStr res;
  frtk_status st = frtk_sdp_verify(sdp, sequence.c_str(), opts.dump().c_str(),
                                   &res.p);
  frtk_sdp_free(sdp);
  if (st != FRTK_OK && st != FRTK_CLAIM_VIOLATED)
    return fail("sdp verify", st);
  const double run_ms = t.lap();

  const Json config{{"input", o.input},
                    {"sequence", o.sequence},
                    {"output", o.output},
                    {"eig_tol", o.eig_tol},
                    {"rank_tol", o.rank_tol}};
  emit_report(envelope("sdp verify", config, Json::parse(res.p),
                       {{"load", load_ms}, {"run", run_ms}}),
              o.output);
  if (st == FRTK_CLAIM_VIOLATED) return fail("sdp verify", st);
  return 0;
}

int run_sdp_lowrank(const Options& o) {
  if (o.input.empty() == (o.worst_case == 0)) {
    std::fprintf(stderr,
                 "frtk: sdp lowrank: give exactly one of PROBLEM or "
                 "--worst-case N\n");
    return 2;
  }
  Timer t;
  frtk_sdp* sdp = nullptr;
  if (o.worst_case != 0) {
    if (frtk_status st = frtk_sdp_worst_case(o.worst_case, &sdp))
      return fail("sdp lowrank", st);
  } else {
    const std::string problem = read_file(o.input);
    if (frtk_status st = frtk_sdp_from_json(problem.c_str(), &sdp))
      return fail("sdp lowrank", st);
  }
  const double load_ms = t.lap();

  const Json opts{{"ranks", o.ranks},
                  {"seed", o.seed},
                  {"res_tol", o.res_tol}};
  CStr res;
  frtk_status st = frtk_sdp_lowrank(sdp, opts.dump().c_str(), &res.p);
  frtk_sdp_free(sdp);
  if (st != FRTK_OK) return fail("sdp lowrank", st);
  const double run_ms = t.lap();

  const Json config{{"input", o.input},
                    {"worst_case", o.worst_case},
                    {"output", o.output},
                    {"ranks", o.ranks},
                    {"seed", o.seed},
                    {"eig_tol", o.eig_tol},
                    {"res_tol", o.res_tol}};
  return emit_report(envelope("sdp lowrank", config, Json::parse(res.p),
                              {{"load", load_ms}, {"run", run_ms}}),
                     o.output);
}

int run_sdp_worst_case(const Options& o) {
  Timer t;
  frtk_sdp* sdp = nullptr;
  if (frtk_status st = frtk_sdp_worst_case(o.order, &sdp))
    return fail("sdp worst-case", st);
  CStr text;
  frtk_status st = frtk_sdp_to_json(sdp, &text.p);
  frtk_sdp_free(sdp);
  if (st != FRTK_OK) return fail("sdp worst-case", st);
  const double run_ms = t.lap();

  const Json config{{"order", o.order}, {"output", o.output}};
  const Json artifact = Json::parse(text.p);
  return emit_artifact(envelope("sdp worst-case", config, artifact,
                                {{"run", run_ms}}),
                       artifact, o.output);
}

int run_sat_reduce(const Options& o) {
  Timer t;
  frtk_cnf* cnf = nullptr;
  const std::string text = read_file(o.input);
  if (frtk_status st = frtk_cnf_from_dimacs(text.c_str(), &cnf))
    return fail("sat reduce", st);
  const double load_ms = t.lap();

  CStr res;
  frtk_status st = frtk_sat_reduce(cnf, &res.p);
  frtk_cnf_free(cnf);
  if (st != FRTK_OK) return fail("sat reduce", st);
  const double run_ms = t.lap();

  const Json config{{"input", o.input}, {"output", o.output}};
  const Json artifact = Json::parse(res.p);
  return emit_artifact(envelope("sat reduce", config, artifact,
                                {{"load", load_ms}, {"run", run_ms}}),
                       artifact, o.output);
}

int run_sat_sequence(const Options& o) {
  Timer t;
  frtk_cnf* cnf = nullptr;
  const std::string text = read_file(o.input);
  if (frtk_status st = frtk_cnf_from_dimacs(text.c_str(), &cnf))
    return fail("sat sequence", st);
  const double load_ms = t.lap();

  const Json opts{{"assign", o.assign}};
  CStr res;
  frtk_status st = frtk_sat_sequence(cnf, opts.dump().c_str(), &res.p);
  frtk_cnf_free(cnf);
  if (st != FRTK_OK) return fail("sat sequence", st);
  const double run_ms = t.lap();

  const Json config{{"input", o.input},
                    {"output", o.output},
                    {"assign", o.assign}};
  Json result = Json::parse(res.p);
  // The artifact is the witness chain itself, consumable by `sdp verify`.
  const Json artifact = result.contains("sequence") ? result["sequence"]
                                                    : result;
  return emit_artifact(envelope("sat sequence", config, std::move(result),
                                {{"load", load_ms}, {"run", run_ms}}),
                       artifact, o.output);
}

int run_sat_certify(const Options& o) {
  Timer t;
  frtk_cnf* cnf = nullptr;
  const std::string text = read_file(o.input);
  if (frtk_status st = frtk_cnf_from_dimacs(text.c_str(), &cnf))
    return fail("sat certify", st);
  const double load_ms = t.lap();

  const Json opts{{"budget", o.budget}, {"jobs", o.jobs}};
  CStr res;
  frtk_status st = frtk_sat_certify(cnf, opts.dump().c_str(), &res.p);
  frtk_cnf_free(cnf);
  if (st != FRTK_OK) return fail("sat certify", st);
  const double run_ms = t.lap();

  Json result = Json::parse(res.p);
  if (!o.output.empty() && result.contains("witness_sequence")) {
    const std::string wpath = o.output + ".witness.json";
    write_file(wpath, dump(result["witness_sequence"]));
    result["witness_file"] = wpath;
  }
  result.erase("witness_sequence");

  const Json config{{"input", o.input},
                    {"output", o.output},
                    {"budget", o.budget},
                    {"jobs", o.jobs}};
  return emit_report(envelope("sat certify", config, std::move(result),
                              {{"load", load_ms}, {"run", run_ms}}),
                     o.output);
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"facial reduction toolkit for linear and semidefinite "
               "feasibility systems"};
  app.set_version_flag("--version", frtk_version());
  app.require_subcommand(1);

  auto add_output = [&](CLI::App* cmd) {
    cmd->add_option("-o,--output", o.output, "write to this path");
  };
  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option("--seed", o.seed,
                    "seed for randomized choices (FR_SEED as fallback)")
        ->envname("FR_SEED")
        ->check(CLI::NonNegativeNumber);
  };

  CLI::App* lp = app.add_subcommand("lp", "exact linear feasibility systems");
  lp->require_subcommand(1);
  CLI::App* lp_analyze = lp->add_subcommand(
      "analyze", "degrees, minimal cone, and a longest minimal reduction");
  lp_analyze->add_option("input", o.input, "system file")->required();
  lp_analyze->add_flag("--brute", o.brute,
                       "cross-check against the exhaustive degree");
  add_seed(lp_analyze);
  add_output(lp_analyze);

  CLI::App* lp_verify =
      lp->add_subcommand("verify", "check a reduction sequence file");
  lp_verify->add_option("input", o.input, "system file")->required();
  lp_verify->add_option("sequence", o.sequence, "sequence file")->required();
  add_output(lp_verify);

  CLI::App* sdp =
      app.add_subcommand("sdp", "semidefinite feasibility systems");
  sdp->require_subcommand(1);
  CLI::App* sdp_verify =
      sdp->add_subcommand("verify", "check a reduction sequence file");
  sdp_verify->add_option("input", o.input, "problem file")->required();
  sdp_verify->add_option("sequence", o.sequence, "sequence file")->required();
  sdp_verify->add_option("--rank-tol", o.rank_tol, "relative rank threshold")
      ->check(CLI::PositiveNumber);
  sdp_verify->add_option("--eig-tol", o.eig_tol,
                         "eigendecomposition accuracy contract")
      ->check(CLI::PositiveNumber);
  add_output(sdp_verify);

  CLI::App* sdp_lowrank = sdp->add_subcommand(
      "lowrank", "greedy reduction via low-rank certificate search");
  sdp_lowrank->add_option("input", o.input, "problem file");
  sdp_lowrank->add_option("--worst-case", o.worst_case,
                          "use the order-N chain instance instead of a file")
      ->check(CLI::PositiveNumber);
  sdp_lowrank->add_option("--ranks", o.ranks,
                          "factor ranks to try, ascending")
      ->delimiter(',');
  sdp_lowrank->add_option("--res-tol", o.res_tol, "search residual target")
      ->check(CLI::PositiveNumber);
  sdp_lowrank->add_option("--eig-tol", o.eig_tol,
                          "eigendecomposition accuracy contract")
      ->check(CLI::PositiveNumber);
  add_seed(sdp_lowrank);
  add_output(sdp_lowrank);

  CLI::App* sdp_wc = sdp->add_subcommand(
      "worst-case", "emit the order-N chain instance");
  sdp_wc->add_option("order", o.order, "matrix order N")->required();
  add_output(sdp_wc);

  CLI::App* sat = app.add_subcommand("sat", "ternary CNF reductions");
  sat->require_subcommand(1);
  CLI::App* sat_reduce = sat->add_subcommand(
      "reduce", "emit the reduction instance of a DIMACS formula");
  sat_reduce->add_option("input", o.input, "DIMACS file")->required();
  add_output(sat_reduce);

  CLI::App* sat_sequence = sat->add_subcommand(
      "sequence", "emit the witness chain of a satisfying assignment");
  sat_sequence->add_option("input", o.input, "DIMACS file")->required();
  sat_sequence
      ->add_option("--assign", o.assign, "assignment bits, e.g. 1,0,1")
      ->required()
      ->delimiter(',');
  add_output(sat_sequence);

  CLI::App* sat_certify = sat->add_subcommand(
      "certify", "decide satisfiability through the degree criterion");
  sat_certify->add_option("input", o.input, "DIMACS file")->required();
  sat_certify->add_option("--budget", o.budget,
                          "assignment enumeration budget")
      ->check(CLI::PositiveNumber);
  sat_certify->add_option("--jobs", o.jobs, "worker threads")
      ->check(CLI::PositiveNumber);
  add_output(sat_certify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (lp_analyze->parsed()) return run_lp_analyze(o);
    if (lp_verify->parsed()) return run_lp_verify(o);
    if (sdp_verify->parsed()) return run_sdp_verify(o);
    if (sdp_lowrank->parsed()) return run_sdp_lowrank(o);
    if (sdp_wc->parsed()) return run_sdp_worst_case(o);
    if (sat_reduce->parsed()) return run_sat_reduce(o);
    if (sat_sequence->parsed()) return run_sat_sequence(o);
    if (sat_certify->parsed()) return run_sat_certify(o);
  } catch (const IoError& e) {
    std::fprintf(stderr, "frtk: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "frtk: unexpected failure: %s\n", e.what());
    return 3;
  }
  return 2;
}
