#include "frtk/json_io.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <utility>

#include "frtk/errors.hpp"
#include "frtk/rational.hpp"

namespace frtk {

namespace {

[[noreturn]] void fail(const std::string& what) { throw ParseError(what); }

const Json& member(const Json& j, const char* key) {
  if (!j.is_object()) fail(std::string("expected an object with \"") + key + "\"");
  auto it = j.find(key);
  if (it == j.end()) fail(std::string("missing key \"") + key + "\"");
  return *it;
}

int int_member(const Json& j, const char* key) {
  const Json& v = member(j, key);
  if (!v.is_number_integer())
    fail(std::string("\"") + key + "\" must be an integer");
  return v.get<int>();
}

Rational rat_entry(const Json& v, const char* where) {
  if (v.is_string()) return rat_from_string(v.get<std::string>());
  if (v.is_number_integer() || v.is_number_unsigned())
    return Rational(static_cast<long>(v.get<std::int64_t>()));
  if (v.is_number_float()) {
    double x = v.get<double>();
    if (!std::isfinite(x)) fail(std::string(where) + ": non-finite entry");
    return rat_from_double(x);
  }
  fail(std::string(where) + ": entry must be a number or \"p/q\" string");
}

double float_entry(const Json& v, const char* where) {
  if (v.is_string())
    return rat_to_double(rat_from_string(v.get<std::string>()));
  if (v.is_number()) {
    double x = v.get<double>();
    if (!std::isfinite(x)) fail(std::string(where) + ": non-finite entry");
    return x;
  }
  fail(std::string(where) + ": entry must be a number or \"p/q\" string");
}

void require_finite(double x, const char* where) {
  if (!std::isfinite(x))
    throw NonFinite(std::string(where) + ": refusing to serialize NaN/inf");
}

RatVec rat_vec(const Json& v, const char* where) {
  if (!v.is_array()) fail(std::string(where) + " must be an array");
  RatVec out;
  out.reserve(v.size());
  for (const Json& e : v) out.push_back(rat_entry(e, where));
  return out;
}

Json rat_vec_json(const RatVec& v) {
  Json out = Json::array();
  for (const Rational& r : v) out.push_back(rat_to_string(r));
  return out;
}

// 1-based sorted-unique index list -> 0-based vector.
std::vector<int> index_list(const Json& v, int n, const char* where) {
  if (!v.is_array()) fail(std::string(where) + " must be an array");
  std::vector<int> out;
  out.reserve(v.size());
  for (const Json& e : v) {
    if (!e.is_number_integer())
      fail(std::string(where) + ": indices must be integers");
    int idx = e.get<int>();
    if (idx < 1 || idx > n)
      fail(std::string(where) + ": index " + std::to_string(idx) +
           " outside 1.." + std::to_string(n));
    out.push_back(idx - 1);
  }
  for (size_t i = 1; i < out.size(); ++i)
    if (out[i] <= out[i - 1])
      fail(std::string(where) + ": indices must be strictly increasing");
  return out;
}

Json index_list_json(const std::vector<int>& zero_based) {
  Json out = Json::array();
  for (int i : zero_based) out.push_back(i + 1);
  return out;
}

std::pair<int, int> line_column_of(const std::string& text, size_t byte) {
  int line = 1, col = 1;
  for (size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

Json linear_set_to_json(const LinearSet& L) {
  L.validate();
  Json rows = Json::array();
  for (int r = 0; r < L.m(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < L.n(); ++c) row.push_back(rat_to_string(L.A.at(r, c)));
    rows.push_back(std::move(row));
  }
  return Json{{"n", L.n()}, {"m", L.m()}, {"A", std::move(rows)},
              {"b", rat_vec_json(L.b)}};
}

LinearSet linear_set_from_json(const Json& j) {
  int n = int_member(j, "n");
  int m = int_member(j, "m");
  if (n < 0 || m < 0) fail("n and m must be nonnegative");
  const Json& a = member(j, "A");
  if (!a.is_array() || static_cast<int>(a.size()) != m)
    fail("\"A\" must be an array of m rows");
  LinearSet L;
  L.A = RatMatrix(m, n);
  for (int r = 0; r < m; ++r) {
    const Json& row = a[r];
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      fail("row " + std::to_string(r + 1) + " of \"A\" must have n entries");
    for (int c = 0; c < n; ++c) L.A.at(r, c) = rat_entry(row[c], "A");
  }
  L.b = rat_vec(member(j, "b"), "b");
  if (static_cast<int>(L.b.size()) != m) fail("\"b\" must have m entries");
  L.validate();
  return L;
}

Json fr_sequence_lp_to_json(const FRSequenceLP& seq) {
  Json steps = Json::array();
  for (const LpExposingVector& s : seq.steps)
    steps.push_back(Json{{"y", rat_vec_json(s.y)}, {"w", rat_vec_json(s.w)}});
  Json faces = Json::array();
  for (const OrthantFace& f : seq.faces) faces.push_back(orthant_face_to_json(f));
  return Json{{"steps", std::move(steps)}, {"faces", std::move(faces)}};
}

FRSequenceLP fr_sequence_lp_from_json(const Json& j, int n) {
  if (n < 0) throw InvalidArgument("ambient dimension is negative");
  FRSequenceLP seq;
  const Json& steps = member(j, "steps");
  if (!steps.is_array()) fail("\"steps\" must be an array");
  for (const Json& s : steps) {
    LpExposingVector e;
    e.y = rat_vec(member(s, "y"), "steps.y");
    e.w = rat_vec(member(s, "w"), "steps.w");
    seq.steps.push_back(std::move(e));
  }
  const Json& faces = member(j, "faces");
  if (!faces.is_array()) fail("\"faces\" must be an array");
  for (const Json& f : faces)
    seq.faces.push_back(OrthantFace{n, index_list(f, n, "faces")});
  return seq;
}

Json sdp_problem_to_json(const SdpProblem& P) {
  P.validate();
  Json mats = Json::array();
  for (const SparseSym& A : P.mats) {
    Json trips = Json::array();
    for (const SparseSym::Entry& e : A.entries) {
      require_finite(e.v, "mats");
      trips.push_back(Json::array({e.r + 1, e.c + 1, e.v}));
    }
    mats.push_back(std::move(trips));
  }
  Json b = Json::array();
  for (double v : P.b) {
    require_finite(v, "b");
    b.push_back(v);
  }
  Json out{{"n", P.n}, {"m", P.m()}, {"mats", std::move(mats)},
           {"b", std::move(b)}};
  if (!P.labels.empty()) {
    Json labels = Json::array();
    for (const auto& t : P.labels)
      labels.push_back(Json::array({t[0], t[1], t[2]}));
    out["labels"] = std::move(labels);
  }
  return out;
}

SdpProblem sdp_problem_from_json(const Json& j) {
  SdpProblem P;
  P.n = int_member(j, "n");
  int m = int_member(j, "m");
  if (P.n < 0 || m < 0) fail("n and m must be nonnegative");
  const Json& mats = member(j, "mats");
  if (!mats.is_array() || static_cast<int>(mats.size()) != m)
    fail("\"mats\" must be an array of m matrices");
  for (const Json& trips : mats) {
    if (!trips.is_array()) fail("each matrix must be an array of triplets");
    SparseSym A(P.n);
    for (const Json& t : trips) {
      if (!t.is_array() || t.size() != 3)
        fail("matrix entries must be [i, j, value] triplets");
      if (!t[0].is_number_integer() || !t[1].is_number_integer())
        fail("triplet indices must be integers");
      int r = t[0].get<int>(), c = t[1].get<int>();
      if (r < 1 || r > P.n || c < 1 || c > P.n)
        fail("triplet index outside 1.." + std::to_string(P.n));
      A.add(r - 1, c - 1, float_entry(t[2], "mats"));
    }
    P.mats.push_back(std::move(A));
  }
  const Json& b = member(j, "b");
  if (!b.is_array() || static_cast<int>(b.size()) != m)
    fail("\"b\" must have m entries");
  for (const Json& v : b) P.b.push_back(float_entry(v, "b"));
  if (j.contains("labels")) {
    const Json& labels = j["labels"];
    if (!labels.is_array() || static_cast<int>(labels.size()) != P.n)
      fail("\"labels\" must have one triple per index");
    for (const Json& t : labels) {
      if (!t.is_array() || t.size() != 3 || !t[0].is_number_integer() ||
          !t[1].is_number_integer() || !t[2].is_number_integer())
        fail("labels must be [i, j, k] integer triples");
      P.labels.push_back({t[0].get<int>(), t[1].get<int>(), t[2].get<int>()});
    }
  }
  P.validate();
  return P;
}

Json orthant_face_to_json(const OrthantFace& f) {
  f.validate();
  return index_list_json(f.zero_set);
}

Json sdp_face_to_json(const SdpFace& f) {
  if (f.block_support) {
    std::vector<int> zero;
    size_t k = 0;
    for (int i = 0; i < f.n(); ++i) {
      if (k < f.block_support->size() && (*f.block_support)[k] == i)
        ++k;
      else
        zero.push_back(i);
    }
    return index_list_json(zero);
  }
  Json rows = Json::array();
  for (int r = 0; r < f.n(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < f.k(); ++c) {
      require_finite(f.V(r, c), "faces.V");
      row.push_back(f.V(r, c));
    }
    rows.push_back(std::move(row));
  }
  return Json{{"V", std::move(rows)}};
}

SdpFace sdp_face_from_json(const Json& j, int n) {
  if (j.is_array()) {
    std::vector<int> zero = index_list(j, n, "faces");
    std::vector<int> support;
    size_t k = 0;
    for (int i = 0; i < n; ++i) {
      if (k < zero.size() && zero[k] == i)
        ++k;
      else
        support.push_back(i);
    }
    return SdpFace::from_support(n, std::move(support));
  }
  if (j.is_object() && j.contains("V")) {
    const Json& rows = j["V"];
    if (!rows.is_array() || static_cast<int>(rows.size()) != n)
      fail("\"V\" must have one row per index");
    int k = rows.empty() ? 0 : static_cast<int>(rows[0].size());
    Eigen::MatrixXd V(n, k);
    for (int r = 0; r < n; ++r) {
      const Json& row = rows[r];
      if (!row.is_array() || static_cast<int>(row.size()) != k)
        fail("\"V\" rows must have equal length");
      for (int c = 0; c < k; ++c) V(r, c) = float_entry(row[c], "faces.V");
    }
    return SdpFace{std::move(V), std::nullopt};
  }
  fail("a face must be an index array or an object with \"V\"");
}

Json fr_sequence_sdp_to_json(const FRSequenceSDP& seq) {
  Json steps = Json::array();
  for (const SdpExposingVector& s : seq.steps) {
    Json y = Json::array();
    for (int i = 0; i < s.y.size(); ++i) {
      require_finite(s.y[i], "steps.y");
      y.push_back(s.y[i]);
    }
    Json trips = Json::array();
    const int n = s.W.order();
    for (int r = 0; r < n; ++r)
      for (int c = r; c < n; ++c)
        if (s.W.m(r, c) != 0.0) {
          require_finite(s.W.m(r, c), "steps.W");
          trips.push_back(Json::array({r + 1, c + 1, s.W.m(r, c)}));
        }
    steps.push_back(Json{{"y", std::move(y)}, {"W", std::move(trips)}});
  }
  Json faces = Json::array();
  for (const SdpFace& f : seq.faces) faces.push_back(sdp_face_to_json(f));
  return Json{{"steps", std::move(steps)}, {"faces", std::move(faces)}};
}

FRSequenceSDP fr_sequence_sdp_from_json(const Json& j, int n) {
  if (n < 0) throw InvalidArgument("ambient dimension is negative");
  FRSequenceSDP seq;
  const Json& steps = member(j, "steps");
  if (!steps.is_array()) fail("\"steps\" must be an array");
  for (const Json& s : steps) {
    SdpExposingVector e;
    const Json& y = member(s, "y");
    if (!y.is_array()) fail("\"y\" must be an array");
    e.y.resize(static_cast<int>(y.size()));
    for (int i = 0; i < e.y.size(); ++i) e.y[i] = float_entry(y[i], "steps.y");
    e.W = SymMatrixF(n);
    const Json& trips = member(s, "W");
    if (!trips.is_array()) fail("\"W\" must be an array of triplets");
    for (const Json& t : trips) {
      if (!t.is_array() || t.size() != 3 || !t[0].is_number_integer() ||
          !t[1].is_number_integer())
        fail("W entries must be [i, j, value] triplets");
      int r = t[0].get<int>(), c = t[1].get<int>();
      if (r < 1 || r > n || c < 1 || c > n)
        fail("W triplet index outside 1.." + std::to_string(n));
      e.W.add(r - 1, c - 1, float_entry(t[2], "steps.W"));
    }
    seq.steps.push_back(std::move(e));
  }
  const Json& faces = member(j, "faces");
  if (!faces.is_array()) fail("\"faces\" must be an array");
  for (const Json& f : faces) seq.faces.push_back(sdp_face_from_json(f, n));
  return seq;
}

Json reduction_instance_to_json(const ReductionInstance& R) {
  Json out = sdp_problem_to_json(R.sdp);
  out["meta"] = Json{{"p", R.p}, {"q", R.q}, {"q_tilde", R.q_tilde},
                     {"d", R.d}};
  return out;
}

Json parse_json_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    auto [line, col] = line_column_of(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ParseError(std::string("invalid JSON: ") + e.what(), line, col);
  }
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str());
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

void save_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  out << dump_json(j);
  if (!out) throw ParseError("short write to " + path);
}

}  // namespace frtk
