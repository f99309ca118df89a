#pragma once

#include <complex>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "shintani/errors.hpp"
#include "shintani/matrix.hpp"
#include "shintani/pole_structure.hpp"
#include "shintani/polyhedra.hpp"
#include "shintani/weight_decomp.hpp"
#include "shintani/zeta_eval.hpp"

namespace shintani {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Input parsing.  Matrices are accepted either as JSON
//   {"rows": n, "cols": r, "entries": [[...], ...]}
// or as whitespace text:  first line "n r", then n rows of r numbers.
// Weight instances are JSON only:
//   {"n": ..., "sets": [[1-based indices], ...], "sigma": [...], "strict": bool}
// ---------------------------------------------------------------------------

inline SigmaMatrix matrix_from_json(const json& j) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("entries"))
    throw Error(ErrorKind::BadInput, "matrix JSON needs rows, cols, entries");
  if (!j["rows"].is_number_integer() || !j["cols"].is_number_integer())
    throw Error(ErrorKind::BadInput, "rows/cols must be integers");
  SigmaMatrix A;
  A.rows = j["rows"].get<int>();
  A.cols = j["cols"].get<int>();
  if (A.rows < 1 || A.cols < 1)
    throw Error(ErrorKind::BadInput, "rows and cols must be at least 1");
  const auto& rows = j["entries"];
  if (!rows.is_array() || static_cast<int>(rows.size()) != A.rows)
    throw Error(ErrorKind::BadInput, "entries must be an array of " + std::to_string(A.rows) +
                                         " rows");
  A.a.reserve(static_cast<std::size_t>(A.rows) * A.cols);
  for (const auto& row : rows) {
    if (!row.is_array() || static_cast<int>(row.size()) != A.cols)
      throw Error(ErrorKind::BadInput, "each entry row must hold " + std::to_string(A.cols) +
                                           " numbers");
    for (const auto& v : row) {
      if (!v.is_number()) throw Error(ErrorKind::BadInput, "matrix entries must be numbers");
      A.a.push_back(v.get<double>());
    }
  }
  return A;
}

inline SigmaMatrix matrix_from_text(const std::string& text) {
  std::istringstream in(text);
  int n = 0, r = 0;
  if (!(in >> n >> r) || n < 1 || r < 1)
    throw Error(ErrorKind::BadInput, "matrix text must start with 'rows cols'");
  SigmaMatrix A;
  A.rows = n;
  A.cols = r;
  A.a.resize(static_cast<std::size_t>(n) * r);
  for (double& v : A.a)
    if (!(in >> v)) throw Error(ErrorKind::BadInput, "matrix text is missing entries");
  double extra;
  if (in >> extra) throw Error(ErrorKind::BadInput, "matrix text has trailing entries");
  return A;
}

// Auto-detects JSON (first non-space char '{') vs plain text.
inline SigmaMatrix parse_matrix(const std::string& text) {
  auto pos = text.find_first_not_of(" \t\r\n");
  if (pos != std::string::npos && text[pos] == '{') {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw Error(ErrorKind::BadInput, std::string("invalid JSON: ") + e.what());
    }
    return matrix_from_json(j);
  }
  return matrix_from_text(text);
}

inline WeightInstance instance_from_json(const json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("sets") || !j.contains("sigma"))
    throw Error(ErrorKind::BadInput, "instance JSON needs n, sets, sigma");
  if (!j["n"].is_number_integer()) throw Error(ErrorKind::BadInput, "n must be an integer");
  WeightInstance inst;
  inst.n = j["n"].get<int>();
  if (!j["sets"].is_array()) throw Error(ErrorKind::BadInput, "sets must be an array");
  for (const auto& set : j["sets"]) {
    if (!set.is_array()) throw Error(ErrorKind::BadInput, "each set must be an index array");
    std::vector<int> S;
    for (const auto& v : set) {
      if (!v.is_number_integer())
        throw Error(ErrorKind::BadInput, "set elements must be integers");
      S.push_back(v.get<int>() - 1);  // wire format is 1-based
    }
    inst.sets.push_back(std::move(S));
  }
  if (!j["sigma"].is_array()) throw Error(ErrorKind::BadInput, "sigma must be an array");
  for (const auto& v : j["sigma"]) {
    if (!v.is_number()) throw Error(ErrorKind::BadInput, "sigma entries must be numbers");
    inst.sigma.push_back(v.get<double>());
  }
  if (j.contains("strict")) {
    if (!j["strict"].is_boolean()) throw Error(ErrorKind::BadInput, "strict must be a boolean");
    inst.strict = j["strict"].get<bool>();
  }
  return inst;
}

inline WeightInstance parse_instance(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::BadInput, std::string("invalid JSON: ") + e.what());
  }
  return instance_from_json(j);
}

// ---------------------------------------------------------------------------
// Output serialization.  All index payloads are 1-based on the wire.
// ---------------------------------------------------------------------------

inline json to_json(const SigmaMatrix& A) {
  json rows = json::array();
  for (int i = 0; i < A.rows; ++i) {
    json row = json::array();
    for (int j = 0; j < A.cols; ++j) row.push_back(A.at(i, j));
    rows.push_back(std::move(row));
  }
  return json{{"rows", A.rows}, {"cols", A.cols}, {"entries", std::move(rows)}};
}

inline json support_to_json(const SupportVector& mu, int n) {
  json out = json::array();
  for (int i = 0; i < n; ++i) out.push_back(mu.test(i) ? 1 : 0);
  return out;
}

inline json to_json(const PoleReport& rep) {
  json families = json::array();
  for (const auto& fam : rep.families) {
    json f;
    f["mu"] = support_to_json(fam.mu, rep.n);
    f["nu"] = fam.nu;
    if (fam.l_all) {
      f["l_range"] = "all";
    } else {
      json ls = json::array();
      for (int l = 0; l < fam.nu; ++l) ls.push_back(l);
      f["l_range"] = std::move(ls);
    }
    json ws = json::array();
    for (const auto& w : fam.witnesses) {
      json one = json::array();
      for (int j : w) one.push_back(j + 1);
      ws.push_back(std::move(one));
    }
    f["witnesses"] = std::move(ws);
    families.push_back(std::move(f));
  }
  json constraints = json::array();
  for (const auto& c : rep.convergence) {
    constraints.push_back(json{{"mu", support_to_json(c.mu, rep.n)}, {"rhs", c.rhs}});
  }
  return json{{"n", rep.n},
              {"r", rep.r},
              {"l_range_convention",
               "singleton-support families carry the finite range 0..nu-1; all "
               "other families list every non-negative integer"},
              {"families", std::move(families)},
              {"convergence", std::move(constraints)}};
}

inline json to_json(const VerifyReport& rep) {
  json out;
  out["samples"] = rep.samples;
  out["agree"] = rep.agree;
  out["ambiguous"] = rep.ambiguous;
  out["disagree"] = json::array();
  for (const auto& pt : rep.disagree) {
    json p = json::array();
    for (double v : pt) p.push_back(v);
    out["disagree"].push_back(std::move(p));
  }
  return out;
}

inline json to_json(const Decomposition& parts) {
  json arr = json::array();
  for (const auto& part : parts) {
    json p = json::array();
    for (double v : part) p.push_back(v);
    arr.push_back(std::move(p));
  }
  return json{{"parts", std::move(arr)}};
}

inline json to_json(const EvalResult& res) {
  return json{{"value", json{{"re", res.value.real()}, {"im", res.value.imag()}}},
              {"error_estimate", res.error_estimate},
              {"terms_used", res.terms_used},
              {"converged", res.converged}};
}

inline json to_json(const MellinCheckResult& res) {
  return json{{"s", res.s}, {"lhs", res.lhs}, {"rhs", res.rhs}, {"abs_diff", res.abs_diff}};
}

inline json error_to_json(const Error& e) {
  json payload;
  payload["kind"] = error_kind_name(e.kind());
  payload["message"] = e.what();
  json idx = json::array();
  for (int i : e.indices()) idx.push_back(i);
  payload["indices"] = std::move(idx);
  return json{{"error", std::move(payload)}};
}

}  // namespace shintani
