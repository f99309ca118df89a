// Command-line front end: analyze | verify | decompose | eval | mellin-check.
// Data goes to stdout as JSON; errors go to stderr as JSON with a short
// human-readable line on stdout (suppressed by --quiet).
//
// Exit codes: 0 data produced, 1 consistency failure (verify disagreement or
// skeleton report mismatch), 2 validation/input error, 3 infeasible instance,
// 4 internal error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "shintani/shintani.hpp"

namespace {

using shintani::Error;
using shintani::ErrorKind;
using shintani::json;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InfeasibleInstance:
      return 3;
    case ErrorKind::InternalError:
      return 4;
    default:
      return 2;
  }
}

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    return buf.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::BadInput, "cannot open input file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int subset_cap_from_env() {
  const char* env = std::getenv("SHINTANI_SUBSET_CAP");
  if (env == nullptr) return shintani::kDefaultSubsetCap;
  std::string text(env);
  std::size_t used = 0;
  int value = 0;
  try {
    value = std::stoi(text, &used);
  } catch (const std::exception&) {
    throw Error(ErrorKind::InvalidParameter,
                "SHINTANI_SUBSET_CAP must be an integer, got '" + text + "'");
  }
  if (used != text.size() || value < 1 || value > 60)
    throw Error(ErrorKind::InvalidParameter,
                "SHINTANI_SUBSET_CAP must be an integer in [1,60], got '" + text + "'");
  return value;
}

double parse_real(const std::string& text) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw Error(ErrorKind::BadInput, "cannot parse number '" + text + "'");
  }
  if (used != text.size())
    throw Error(ErrorKind::BadInput, "cannot parse number '" + text + "'");
  return value;
}

// Accepts "2", "-1.5", "1+2i", "1-2e-3i", "2i", "i", "-i".
std::complex<double> parse_complex(std::string text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.erase(0, 1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.pop_back();
  if (text.empty()) throw Error(ErrorKind::BadInput, "empty component in s");
  if (text.back() != 'i' && text.back() != 'I') return {parse_real(text), 0.0};
  std::string body = text.substr(0, text.size() - 1);
  std::size_t split = std::string::npos;
  for (std::size_t p = body.size(); p-- > 1;) {
    if ((body[p] == '+' || body[p] == '-') && body[p - 1] != 'e' && body[p - 1] != 'E') {
      split = p;
      break;
    }
  }
  double re = 0.0;
  std::string im_text = body;
  if (split != std::string::npos) {
    re = parse_real(body.substr(0, split));
    im_text = body.substr(split);
  }
  double im;
  if (im_text.empty() || im_text == "+")
    im = 1.0;
  else if (im_text == "-")
    im = -1.0;
  else
    im = parse_real(im_text);
  return {re, im};
}

std::vector<std::complex<double>> parse_s_list(const std::string& text) {
  std::vector<std::complex<double>> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) out.push_back(parse_complex(item));
  if (out.empty()) throw Error(ErrorKind::BadInput, "--s must list at least one exponent");
  return out;
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

int run_analyze(const std::string& input, bool with_skeleton, int cap, bool /*quiet*/) {
  shintani::SigmaMatrix A = shintani::parse_matrix(read_input(input));
  auto report = shintani::enumerate_pole_families(A, cap);
  json out = shintani::to_json(report);
  bool mismatch = false;
  if (with_skeleton) {
    shintani::SigmaMatrix S = shintani::skeleton(A);
    auto skel_report = shintani::enumerate_pole_families(S, cap);
    json skel_json = shintani::to_json(skel_report);
    mismatch = skel_json.dump() != out.dump();
    out["skeleton"] = shintani::to_json(S);
    out["skeleton_report_equal"] = !mismatch;
  }
  emit(out);
  return mismatch ? 1 : 0;
}

int run_verify(const std::string& input, std::int64_t samples, std::uint64_t seed, int cap,
               bool /*quiet*/) {
  shintani::SigmaMatrix A = shintani::parse_matrix(read_input(input));
  shintani::validate(A);
  if (A.cols > cap)
    throw Error(ErrorKind::SubsetCapExceeded,
                "matrix has " + std::to_string(A.cols) + " columns, cap is " +
                    std::to_string(cap));
  json per_J = json::array();
  bool pass = true;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << A.cols); ++mask) {
    std::vector<int> J;
    for (int j = 0; j < A.cols; ++j)
      if (mask & (std::uint64_t{1} << j)) J.push_back(j);
    auto rep = shintani::verify_polyhedron_equality(A, J, samples, seed + mask, cap);
    json row;
    json jj = json::array();
    for (int j : J) jj.push_back(j + 1);
    row["J"] = std::move(jj);
    row["samples"] = rep.samples;
    row["agree"] = rep.agree;
    row["ambiguous"] = rep.ambiguous;
    json dis = json::array();
    for (const auto& pt : rep.disagree) {
      json p = json::array();
      for (double v : pt) p.push_back(v);
      dis.push_back(std::move(p));
    }
    row["disagree"] = std::move(dis);
    if (!rep.disagree.empty()) pass = false;
    per_J.push_back(std::move(row));
  }
  json out{{"rows", A.rows},
           {"cols", A.cols},
           {"samples", samples},
           {"seed", seed},
           {"per_J", std::move(per_J)},
           {"pass", pass}};
  emit(out);
  return pass ? 0 : 1;
}

int run_decompose(const std::string& input, const std::string& algorithm, bool /*quiet*/) {
  shintani::WeightInstance inst = shintani::parse_instance(read_input(input));
  shintani::Decomposition parts;
  if (algorithm == "graph")
    parts = shintani::decompose_graph(inst);
  else
    parts = shintani::decompose_flow(inst);
  emit(shintani::to_json(parts));
  return 0;
}

int run_eval(const std::string& input, const std::string& s_text, double tol,
             std::int64_t max_terms, bool /*quiet*/) {
  shintani::EvalRequest req;
  req.A = shintani::parse_matrix(read_input(input));
  req.s = parse_s_list(s_text);
  req.rel_tol = tol;
  req.max_terms_per_axis = max_terms;
  emit(shintani::to_json(shintani::eval_zeta(req)));
  return 0;
}

int run_mellin(double s, int quad_points, double cutoff, bool /*quiet*/) {
  emit(shintani::to_json(shintani::mellin_cross_check_1d(s, quad_points, cutoff)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shintani zeta toolkit: pole structure, polyhedra, weights, evaluation"};
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("--quiet", quiet, "suppress human-readable error summary lines");

  std::string input = "-";
  bool with_skeleton = false;
  auto* analyze = app.add_subcommand("analyze", "pole families and convergence region");
  analyze->add_option("input", input, "matrix file (JSON or text), '-' for stdin");
  analyze->add_flag("--skeleton", with_skeleton, "also report skeleton(A) and compare");

  std::string v_input = "-";
  std::int64_t samples = 1000;
  std::uint64_t seed = 1;
  auto* verify = app.add_subcommand("verify", "facet identity check over every subset J");
  verify->add_option("input", v_input, "matrix file (JSON or text), '-' for stdin");
  verify->add_option("--samples", samples, "sample points per subset")->default_val(1000);
  verify->add_option("--seed", seed, "RNG seed")->default_val(1);

  std::string d_input = "-";
  std::string algorithm = "graph";
  auto* decompose = app.add_subcommand("decompose", "weight decomposition over a set family");
  decompose->add_option("input", d_input, "instance file (JSON), '-' for stdin");
  decompose->add_option("--algorithm", algorithm, "graph or flow")
      ->check(CLI::IsMember({"graph", "flow"}))
      ->default_val("graph");

  std::string e_input = "-";
  std::string s_text;
  double tol = 1e-7;
  std::int64_t max_terms = std::int64_t{1} << 20;
  auto* eval = app.add_subcommand("eval", "numerical zeta value inside the convergence region");
  eval->add_option("input", e_input, "matrix file (JSON or text), '-' for stdin");
  eval->add_option("--s", s_text, "comma-separated exponents, e.g. '2' or '1,2' or '1+0.5i,2'")
      ->required();
  eval->add_option("--tol", tol, "relative tolerance for the doubling driver")
      ->default_val(1e-7);
  eval->add_option("--max-terms", max_terms, "per-axis truncation cap")
      ->default_val(std::int64_t{1} << 20);

  double mellin_s = 2.0;
  int quad_points = 10000;
  double cutoff = 40.0;
  auto* mellin = app.add_subcommand("mellin-check", "1-D Mellin identity cross-check");
  mellin->add_option("--s", mellin_s, "real exponent, s > 1")->required();
  mellin->add_option("--quad-points", quad_points, "Simpson intervals per piece")
      ->default_val(10000);
  mellin->add_option("--cutoff", cutoff, "upper integration limit")->default_val(40.0);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    int cap = subset_cap_from_env();
    if (analyze->parsed()) return run_analyze(input, with_skeleton, cap, quiet);
    if (verify->parsed()) return run_verify(v_input, samples, seed, cap, quiet);
    if (decompose->parsed()) return run_decompose(d_input, algorithm, quiet);
    if (eval->parsed()) return run_eval(e_input, s_text, tol, max_terms, quiet);
    if (mellin->parsed()) return run_mellin(mellin_s, quad_points, cutoff, quiet);
    return 2;  // unreachable: require_subcommand(1)
  } catch (const Error& e) {
    std::cerr << shintani::error_to_json(e).dump(2) << "\n";
    if (!quiet)
      std::cout << "error (" << shintani::error_kind_name(e.kind()) << "): " << e.what()
                << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    Error wrapped(ErrorKind::InternalError, std::string("unexpected: ") + e.what());
    std::cerr << shintani::error_to_json(wrapped).dump(2) << "\n";
    if (!quiet) std::cout << "error (InternalError): " << e.what() << "\n";
    return 4;
  }
}
