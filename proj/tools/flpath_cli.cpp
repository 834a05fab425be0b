// Command-line front end: instance ingestion, path computation, point and
// inverse queries, oracle verification, and the path-vs-from-scratch
// benchmark. Machine-readable JSON goes to stdout; exit codes are 0 on
// success, 1 on usage errors, 2 on malformed or invalid input documents,
// 3 on verification mismatches and 4 on internal errors.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "flpath/bench.hpp"
#include "flpath/io.hpp"
#include "flpath/oracle.hpp"

namespace {

using flpath::io::json;

std::string read_input(const std::string& file) {
  if (file.empty()) {
    std::ostringstream buffer;
    buffer << std::cin.rdbuf();
    return buffer.str();
  }
  std::ifstream in(file);
  if (!in) throw flpath::ParseError("cannot open file: " + file);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_output(const json& doc, const std::string& file) {
  if (file.empty()) {
    std::cout << doc.dump(2) << '\n';
    return;
  }
  std::ofstream out(file);
  if (!out) throw flpath::ParseError("cannot open file for writing: " + file);
  out << doc.dump(2) << '\n';
}

json solution_to_json(const std::vector<flpath::Rational>& x) {
  json out = json::array();
  for (const flpath::Rational& v : x) out.push_back(flpath::io::rational_to_json(v));
  return out;
}

struct Options {
  std::string instance_file;
  std::string path_file;
  std::string out_file;
  std::string csv_file;
  std::int64_t lambda = 0;
  std::int64_t max_lambda = -1;
  int from = 1;
  int to = 1;
  int value_index = 1;
  long queries = 100;
  std::uint64_t seed = 12345;
};

int run_solve(const Options& opt) {
  const flpath::ProblemInstance inst = flpath::io::parse_instance(read_input(opt.instance_file));
  if (opt.lambda < 0) throw flpath::ParseError("lambda must be nonnegative");
  const std::vector<flpath::Rational> x = flpath::solve_fixed_lambda(inst, opt.lambda);
  const flpath::GroupArray group = flpath::compute_group(x);
  json bits = json::array();
  for (const std::uint8_t b : group.bits) bits.push_back(static_cast<int>(b));
  write_output(json{{"lambda", opt.lambda},
                    {"solution", solution_to_json(x)},
                    {"objective", flpath::io::rational_to_json(inst.objective(x, opt.lambda))},
                    {"group", bits}},
               opt.out_file);
  return 0;
}

int run_path(const Options& opt) {
  const flpath::ProblemInstance inst = flpath::io::parse_instance(read_input(opt.instance_file));
  const flpath::SolutionPath path = flpath::solve_full_path(inst);
  if (!opt.csv_file.empty()) {
    std::ofstream csv(opt.csv_file);
    if (!csv) throw flpath::ParseError("cannot open file for writing: " + opt.csv_file);
    flpath::io::write_step_csv(path, csv);
  }
  write_output(flpath::io::to_json(path), opt.out_file);
  return 0;
}

int run_eval(const Options& opt) {
  const flpath::SolutionPath path = flpath::io::parse_path_document(read_input(opt.path_file));
  if (opt.lambda < 0) throw flpath::ParseError("lambda must be nonnegative");
  const std::vector<flpath::Rational> x = flpath::eval_path(path, opt.lambda);
  write_output(json{{"lambda", opt.lambda}, {"solution", solution_to_json(x)}}, opt.out_file);
  return 0;
}

int run_inverse(const Options& opt) {
  const flpath::SolutionPath path = flpath::io::parse_path_document(read_input(opt.path_file));
  if (opt.from < 1 || opt.to < opt.from || opt.to > path.node_count)
    throw flpath::ParseError("need 1 <= from <= to <= n");
  if (opt.value_index < 1 || static_cast<std::size_t>(opt.value_index) > path.breakpoints.size())
    throw flpath::ParseError("value-index out of range");
  const auto intervals =
      flpath::inverse_query(path, opt.from - 1, opt.to - 1, opt.value_index - 1);
  json out{{"from", opt.from},
           {"to", opt.to},
           {"value_index", opt.value_index},
           {"value", flpath::io::rational_to_json(
                         path.breakpoints[static_cast<std::size_t>(opt.value_index) - 1].value)}};
  if (intervals) {
    json list = json::array();
    for (const flpath::LambdaInterval& intv : *intervals)
      list.push_back(flpath::io::interval_to_json(intv));
    out["intervals"] = list;
  } else {
    out["intervals"] = nullptr;
  }
  write_output(out, opt.out_file);
  return 0;
}

int run_verify(const Options& opt) {
  const flpath::ProblemInstance inst = flpath::io::parse_instance(read_input(opt.instance_file));
  const std::int64_t hi =
      opt.max_lambda >= 0 ? opt.max_lambda : flpath::lambda_max(inst) + 3;
  const bool exhaustive = inst.node_count() <= 5 && inst.breakpoint_count() <= 10;
  const auto mode =
      exhaustive ? flpath::oracle::Mode::full_enumeration : flpath::oracle::Mode::objective_only;
  const flpath::SolutionPath path = flpath::solve_full_path(inst);
  flpath::oracle::OracleReport report =
      flpath::oracle::verify_path(path, inst, flpath::oracle::sweep(inst, hi, mode), mode);
  json mismatches = json::array();
  for (std::size_t t = 0; t < report.mismatches.size() && t < 20; ++t)
    mismatches.push_back(json{{"lambda", report.mismatches[t].lambda},
                              {"node", report.mismatches[t].node + 1}});
  write_output(json{{"lambda_hi", hi},
                    {"mode", exhaustive ? "full_enumeration" : "objective_only"},
                    {"mismatch_count", report.mismatches.size()},
                    {"mismatches", mismatches}},
               opt.out_file);
  return report.mismatches.empty() ? 0 : 3;
}

int run_bench_cmd(const Options& opt) {
  const flpath::ProblemInstance inst = flpath::io::parse_instance(read_input(opt.instance_file));
  if (opt.queries <= 0) throw flpath::ParseError("queries must be positive");
  const std::int64_t hi = flpath::lambda_max(inst);
  std::mt19937_64 rng(opt.seed);
  std::uniform_int_distribution<std::int64_t> pick(0, hi);
  std::vector<std::int64_t> lambdas(static_cast<std::size_t>(opt.queries));
  for (auto& lambda : lambdas) lambda = pick(rng);
  const flpath::BenchResult result = flpath::run_bench(inst, lambdas);
  write_output(json{{"n", inst.node_count()},
                    {"q", inst.breakpoint_count()},
                    {"queries", opt.queries},
                    {"lambda_max", hi},
                    {"path_ms", result.path_ms},
                    {"scratch_ms", result.scratch_ms},
                    {"ratio", result.ratio},
                    {"fixed_lambda_solves_in_path", result.fixed_lambda_solves_in_path},
                    {"mismatches", result.mismatches}},
               opt.out_file);
  return result.mismatches == 0 ? 0 : 3;
}

int run_linearize(const Options& opt) {
  const flpath::io::InstanceDocument doc =
      flpath::io::parse_instance_document(read_input(opt.instance_file));
  write_output(flpath::io::to_json(flpath::io::linearized_document(doc)), opt.out_file);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Full regularization path of the 1-D fused lasso with convex "
               "piecewise-linear fidelity losses"};
  app.require_subcommand(1);
  Options opt;

  const auto add_instance = [&](CLI::App* cmd) {
    cmd->add_option("--instance", opt.instance_file, "Instance document (default: stdin)");
  };
  const auto add_out = [&](CLI::App* cmd) {
    cmd->add_option("--out", opt.out_file, "Write the JSON result here instead of stdout");
  };

  CLI::App* solve = app.add_subcommand("solve", "Solve one fixed lambda from scratch");
  add_instance(solve);
  add_out(solve);
  solve->add_option("--lambda", opt.lambda, "Integer lambda >= 0")->required();

  CLI::App* path = app.add_subcommand("path", "Compute the full path document");
  add_instance(path);
  add_out(path);
  path->add_option("--csv", opt.csv_file, "Also write per-node step tables as CSV");

  CLI::App* eval = app.add_subcommand("eval", "Evaluate a stored path at one lambda");
  add_out(eval);
  eval->add_option("--path", opt.path_file, "Path document file")->required();
  eval->add_option("--lambda", opt.lambda, "Integer lambda >= 0")->required();

  CLI::App* inverse =
      app.add_subcommand("inverse", "All lambda where nodes from..to equal a breakpoint value");
  add_out(inverse);
  inverse->add_option("--path", opt.path_file, "Path document file")->required();
  inverse->add_option("--from", opt.from, "First node (1-based)")->required();
  inverse->add_option("--to", opt.to, "Last node (1-based)")->required();
  inverse->add_option("--value-index", opt.value_index, "Global breakpoint index (1-based)")
      ->required();

  CLI::App* verify = app.add_subcommand("verify", "Compare the path against the oracle sweep");
  add_instance(verify);
  add_out(verify);
  verify->add_option("--max-lambda", opt.max_lambda,
                     "Sweep limit (default: lambda_max + 3)");

  CLI::App* bench =
      app.add_subcommand("bench", "Time K path queries against K from-scratch solves");
  add_instance(bench);
  add_out(bench);
  bench->add_option("--queries", opt.queries, "Number of lambda queries")->required();
  bench->add_option("--seed", opt.seed, "Query sampling seed");

  CLI::App* linearize =
      app.add_subcommand("linearize", "Emit the instance with every loss compiled to pwl form");
  add_instance(linearize);
  add_out(linearize);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (solve->parsed()) return run_solve(opt);
    if (path->parsed()) return run_path(opt);
    if (eval->parsed()) return run_eval(opt);
    if (inverse->parsed()) return run_inverse(opt);
    if (verify->parsed()) return run_verify(opt);
    if (bench->parsed()) return run_bench_cmd(opt);
    if (linearize->parsed()) return run_linearize(opt);
  } catch (const flpath::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    // InvalidPwl, NotCoercive, InvalidEps, TooLarge: bad input documents.
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 4;
  }
  return 1;
}
