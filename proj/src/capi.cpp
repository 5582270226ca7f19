#include "frtk.h"

#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "frtk/errors.hpp"
#include "frtk/json_io.hpp"
#include "frtk/lp_fr.hpp"
#include "frtk/sat_reduce.hpp"
#include "frtk/sdp_fr.hpp"

using frtk::Json;

struct frtk_lp {
  frtk::LinearSet v;
};
struct frtk_sdp {
  frtk::SdpProblem v;
};
struct frtk_cnf {
  frtk::CnfInstance v;
};

namespace {

constexpr char kVersion[] = "0.1.0";

thread_local std::string g_last_error;

frtk_status failure(frtk_status code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

template <typename Fn>
frtk_status guarded(Fn&& fn) noexcept {
  try {
    return fn();
  } catch (const frtk::BudgetExceeded& e) {
    return failure(FRTK_BUDGET_EXCEEDED, e.what());
  } catch (const frtk::TooLarge& e) {
    return failure(FRTK_BUDGET_EXCEEDED, e.what());
  } catch (const frtk::ClaimViolated& e) {
    return failure(FRTK_CLAIM_VIOLATED, e.what());
  } catch (const frtk::InternalError& e) {
    return failure(FRTK_INTERNAL_ERROR, e.what());
  } catch (const frtk::ParseError& e) {
    return failure(FRTK_INPUT_ERROR, e.what());
  } catch (const frtk::InvalidArgument& e) {
    return failure(FRTK_INPUT_ERROR, e.what());
  } catch (const frtk::PreconditionFailed& e) {
    return failure(FRTK_INPUT_ERROR, e.what());
  } catch (const frtk::EmptyFeasibleSet& e) {
    return failure(FRTK_INPUT_ERROR, e.what());
  } catch (const frtk::Error& e) {
    return failure(FRTK_INTERNAL_ERROR, e.what());
  } catch (const std::exception& e) {
    return failure(FRTK_INTERNAL_ERROR, e.what());
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw frtk::InvalidArgument(what);
}

// The result buffer is malloc'd so frtk_string_free can be plain free.
void emit(char** out, const Json& j) {
  require(out != nullptr, "output pointer is null");
  const std::string text = frtk::dump_json(j);
  char* s = static_cast<char*>(std::malloc(text.size() + 1));
  if (!s) throw std::bad_alloc();
  std::memcpy(s, text.c_str(), text.size() + 1);
  *out = s;
}

Json parse_options(const char* options_json) {
  if (!options_json || !*options_json) return Json::object();
  Json j = frtk::parse_json_text(options_json);
  if (!j.is_object()) throw frtk::ParseError("options must be a JSON object");
  return j;
}

long long int_option(const Json& opts, const char* key, long long fallback,
                     long long min_value) {
  if (!opts.contains(key)) return fallback;
  const Json& v = opts[key];
  if (!v.is_number_integer())
    throw frtk::InvalidArgument(std::string("option \"") + key +
                                "\" must be an integer");
  long long x = v.get<long long>();
  if (x < min_value)
    throw frtk::InvalidArgument(std::string("option \"") + key +
                                "\" must be >= " + std::to_string(min_value));
  return x;
}

double tol_option(const Json& opts, const char* key, double fallback) {
  if (!opts.contains(key)) return fallback;
  const Json& v = opts[key];
  if (!v.is_number())
    throw frtk::InvalidArgument(std::string("option \"") + key +
                                "\" must be a number");
  double x = v.get<double>();
  if (!(x > 0.0))
    throw frtk::InvalidArgument(std::string("option \"") + key +
                                "\" must be positive");
  return x;
}

bool bool_option(const Json& opts, const char* key) {
  if (!opts.contains(key)) return false;
  const Json& v = opts[key];
  if (!v.is_boolean())
    throw frtk::InvalidArgument(std::string("option \"") + key +
                                "\" must be a boolean");
  return v.get<bool>();
}

Json bool_array(const std::vector<bool>& v) {
  Json out = Json::array();
  for (bool b : v) out.push_back(b);
  return out;
}

Json assignment_array(const frtk::Assignment& a) {
  Json out = Json::array();
  for (bool b : a.values) out.push_back(b ? 1 : 0);
  return out;
}

frtk::CnfInstance preprocessed_of(const frtk_cnf* cnf) {
  return cnf->v.preprocessed ? cnf->v : frtk::preprocess(cnf->v);
}

}  // namespace

extern "C" {

const char* frtk_version(void) { return kVersion; }

const char* frtk_last_error(void) { return g_last_error.c_str(); }

void frtk_string_free(char* s) { std::free(s); }

frtk_status frtk_lp_from_json(const char* text, frtk_lp** out) {
  return guarded([&]() -> frtk_status {
    require(text != nullptr, "input text is null");
    require(out != nullptr, "output pointer is null");
    auto h = std::make_unique<frtk_lp>();
    h->v = frtk::linear_set_from_json(frtk::parse_json_text(text));
    *out = h.release();
    return FRTK_OK;
  });
}

void frtk_lp_free(frtk_lp* lp) { delete lp; }

frtk_status frtk_sdp_from_json(const char* text, frtk_sdp** out) {
  return guarded([&]() -> frtk_status {
    require(text != nullptr, "input text is null");
    require(out != nullptr, "output pointer is null");
    auto h = std::make_unique<frtk_sdp>();
    h->v = frtk::sdp_problem_from_json(frtk::parse_json_text(text));
    *out = h.release();
    return FRTK_OK;
  });
}

frtk_status frtk_sdp_worst_case(int n, frtk_sdp** out) {
  return guarded([&]() -> frtk_status {
    require(out != nullptr, "output pointer is null");
    auto h = std::make_unique<frtk_sdp>();
    h->v = frtk::worst_case_instance(n);
    *out = h.release();
    return FRTK_OK;
  });
}

frtk_status frtk_sdp_to_json(const frtk_sdp* sdp, char** json_out) {
  return guarded([&]() -> frtk_status {
    require(sdp != nullptr, "sdp handle is null");
    emit(json_out, frtk::sdp_problem_to_json(sdp->v));
    return FRTK_OK;
  });
}

void frtk_sdp_free(frtk_sdp* sdp) { delete sdp; }

frtk_status frtk_cnf_from_dimacs(const char* text, frtk_cnf** out) {
  return guarded([&]() -> frtk_status {
    require(text != nullptr, "input text is null");
    require(out != nullptr, "output pointer is null");
    auto h = std::make_unique<frtk_cnf>();
    h->v = frtk::parse_dimacs(text);
    *out = h.release();
    return FRTK_OK;
  });
}

void frtk_cnf_free(frtk_cnf* cnf) { delete cnf; }

frtk_status frtk_lp_analyze(const frtk_lp* lp, const char* options_json,
                            char** result_json) {
  return guarded([&]() -> frtk_status {
    require(lp != nullptr, "lp handle is null");
    Json opts = parse_options(options_json);
    const bool brute = bool_option(opts, "brute");
    const auto seed =
        static_cast<std::uint64_t>(int_option(opts, "seed", 0, 0));

    const frtk::LinearSet& L = lp->v;
    L.validate();
    frtk::OrthantFace cone = frtk::minimal_cone_lp(L);
    frtk::FRSequenceLP seq =
        frtk::fra_minimal(L, frtk::OrthantFace::full(L.n()), seed);
    if (seq.faces.empty() || seq.faces.back().zero_set != cone.zero_set)
      throw frtk::InternalError(
          "reduction final face disagrees with the minimal cone");
    frtk::SdResult sd = frtk::sd_lp(L);

    Json result{{"msd", static_cast<int>(seq.steps.size())},
                {"sd", sd.sd},
                {"minimal_cone", frtk::orthant_face_to_json(cone)},
                {"sequence", frtk::fr_sequence_lp_to_json(seq)}};
    frtk_status status = FRTK_OK;
    if (brute) {
      const int exact = frtk::brute_force_msd(L);
      result["brute_force"] = exact;
      if (exact != static_cast<int>(seq.steps.size()))
        status = failure(FRTK_CLAIM_VIOLATED,
                         "greedy reduction length disagrees with the "
                         "exhaustive degree");
    }
    emit(result_json, result);
    return status;
  });
}

frtk_status frtk_lp_verify(const frtk_lp* lp, const char* sequence_json,
                           char** result_json) {
  return guarded([&]() -> frtk_status {
    require(lp != nullptr, "lp handle is null");
    require(sequence_json != nullptr, "sequence text is null");
    frtk::FRSequenceLP seq = frtk::fr_sequence_lp_from_json(
        frtk::parse_json_text(sequence_json), lp->v.n());
    frtk::LpVerifyReport rep = frtk::verify_sequence_lp(lp->v, seq);
    Json result{{"valid", rep.valid},
                {"minimal", rep.minimal},
                {"length", rep.length},
                {"final_face", frtk::orthant_face_to_json(rep.final_face)},
                {"diagnoses", rep.diagnoses}};
    emit(result_json, result);
    return rep.valid ? FRTK_OK
                     : failure(FRTK_CLAIM_VIOLATED,
                               "sequence failed verification");
  });
}

frtk_status frtk_sdp_verify(const frtk_sdp* sdp, const char* sequence_json,
                            const char* options_json, char** result_json) {
  return guarded([&]() -> frtk_status {
    require(sdp != nullptr, "sdp handle is null");
    require(sequence_json != nullptr, "sequence text is null");
    Json opts = parse_options(options_json);
    const double rank_tol =
        tol_option(opts, "rank_tol", frtk::kDefaultRankTol);
    frtk::FRSequenceSDP seq = frtk::fr_sequence_sdp_from_json(
        frtk::parse_json_text(sequence_json), sdp->v.n);
    frtk::SdpVerifyReport rep =
        frtk::verify_sequence_sdp(sdp->v, seq, rank_tol);
    Json result{{"valid", rep.valid},
                {"length", rep.length},
                {"rank_drops", rep.rank_drops},
                {"minimal_certified", bool_array(rep.minimal_certified)},
                {"final_face", frtk::sdp_face_to_json(rep.final_face)},
                {"diagnoses", rep.diagnoses}};
    emit(result_json, result);
    return rep.valid ? FRTK_OK
                     : failure(FRTK_CLAIM_VIOLATED,
                               "sequence failed verification");
  });
}

frtk_status frtk_sdp_lowrank(const frtk_sdp* sdp, const char* options_json,
                             char** result_json) {
  return guarded([&]() -> frtk_status {
    require(sdp != nullptr, "sdp handle is null");
    Json opts = parse_options(options_json);
    std::vector<int> ranks{1};
    if (opts.contains("ranks")) {
      const Json& r = opts["ranks"];
      if (!r.is_array() || r.empty())
        throw frtk::InvalidArgument(
            "option \"ranks\" must be a nonempty array");
      ranks.clear();
      for (const Json& v : r) {
        if (!v.is_number_integer() || v.get<int>() < 1)
          throw frtk::InvalidArgument(
              "option \"ranks\" entries must be integers >= 1");
        ranks.push_back(v.get<int>());
      }
    }
    const int seeds = static_cast<int>(int_option(opts, "seeds", 16, 1));
    const auto seed_base =
        static_cast<unsigned>(int_option(opts, "seed", 0, 0));
    const double res_tol = tol_option(opts, "res_tol", 1e-8);
    const int max_iter = static_cast<int>(int_option(opts, "max_iter", 500, 1));

    frtk::FraLowrankResult out = frtk::fra_lowrank(
        sdp->v, ranks, seeds, res_tol, max_iter, seed_base);
    Json result{
        {"termination", out.termination == frtk::FraTermination::ZeroFace
                            ? "zero_face"
                            : "search_exhausted"},
        {"length", static_cast<int>(out.seq.steps.size())},
        {"sequence", frtk::fr_sequence_sdp_to_json(out.seq)},
        {"residuals", out.residuals},
        {"ranks", out.ranks},
        {"seeds", out.seeds_used}};
    emit(result_json, result);
    return FRTK_OK;
  });
}

frtk_status frtk_sat_reduce(const frtk_cnf* cnf, char** result_json) {
  return guarded([&]() -> frtk_status {
    require(cnf != nullptr, "cnf handle is null");
    frtk::CnfInstance pre = preprocessed_of(cnf);
    if (pre.q() == 0) {
      emit(result_json, Json{{"trivialized", true}});
      return FRTK_OK;
    }
    frtk::ReductionInstance R =
        frtk::build_msd_sdp(frtk::duplicate_clauses(pre));
    emit(result_json, frtk::reduction_instance_to_json(R));
    return FRTK_OK;
  });
}

frtk_status frtk_sat_sequence(const frtk_cnf* cnf, const char* options_json,
                              char** result_json) {
  return guarded([&]() -> frtk_status {
    require(cnf != nullptr, "cnf handle is null");
    Json opts = parse_options(options_json);
    if (!opts.contains("assign") || !opts["assign"].is_array())
      throw frtk::InvalidArgument(
          "option \"assign\" must be an array of 0/1 values");
    std::vector<int> raw;
    for (const Json& v : opts["assign"]) {
      if (!v.is_number_integer() ||
          (v.get<int>() != 0 && v.get<int>() != 1))
        throw frtk::InvalidArgument(
            "option \"assign\" entries must be 0 or 1");
      raw.push_back(v.get<int>());
    }

    frtk::CnfInstance pre = preprocessed_of(cnf);
    if (pre.q() == 0) {
      emit(result_json, Json{{"trivialized", true}});
      return FRTK_OK;
    }
    frtk::Assignment a;
    if (static_cast<int>(raw.size()) == pre.p) {
      for (int v : raw) a.values.push_back(v == 1);
    } else if (static_cast<int>(raw.size()) == cnf->v.p) {
      // Project through preprocessing: keep the surviving variables.
      for (int i = 0; i < pre.p; ++i)
        a.values.push_back(raw[pre.original_vars[i] - 1] == 1);
    } else {
      throw frtk::InvalidArgument(
          "option \"assign\" must list every variable");
    }

    frtk::ReductionInstance R =
        frtk::build_msd_sdp(frtk::duplicate_clauses(pre));
    frtk::FRSequenceSDP seq = frtk::assignment_to_sequence(R, a);
    frtk::SdpVerifyReport rep = frtk::verify_sequence_sdp(R.sdp, seq);
    if (!rep.valid)
      throw frtk::InternalError("forward witness failed verification");
    Json result{{"p", R.p},
                {"q", R.q},
                {"d", R.d},
                {"length", rep.length},
                {"valid", true},
                {"assignment", assignment_array(a)},
                {"rank_drops", rep.rank_drops},
                {"sequence", frtk::fr_sequence_sdp_to_json(seq)}};
    emit(result_json, result);
    return FRTK_OK;
  });
}

frtk_status frtk_sat_certify(const frtk_cnf* cnf, const char* options_json,
                             char** result_json) {
  return guarded([&]() -> frtk_status {
    require(cnf != nullptr, "cnf handle is null");
    Json opts = parse_options(options_json);
    const long budget =
        static_cast<long>(int_option(opts, "budget", 1 << 20, 1));
    const int jobs = static_cast<int>(int_option(opts, "jobs", 1, 1));

    frtk::CertifyReport rep = frtk::certify(cnf->v, budget, jobs);
    Json result{{"satisfiable", rep.satisfiable},
                {"trivialized", rep.trivialized},
                {"msd", rep.msd},
                {"d", rep.d}};
    if (rep.witness_assignment)
      result["witness_assignment"] = assignment_array(*rep.witness_assignment);
    if (rep.witness_sequence)
      result["witness_sequence"] =
          frtk::fr_sequence_sdp_to_json(*rep.witness_sequence);
    emit(result_json, result);
    return FRTK_OK;
  });
}

}  // extern "C"
