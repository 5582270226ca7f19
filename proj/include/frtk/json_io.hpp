#pragma once

#include <json.hpp>

#include <string>

#include "frtk/lp_fr.hpp"
#include "frtk/sat_reduce.hpp"
#include "frtk/sdp_fr.hpp"

namespace frtk {

using Json = nlohmann::json;

// Wire formats. All indices in files are 1-based; in-memory structures stay
// 0-based. Exact rationals travel as "p/q" strings (q omitted when 1);
// binary64 values travel as JSON numbers and survive a round trip bit for
// bit. Parsers throw ParseError on shape or value problems and refuse
// non-finite numbers; emitters throw NonFinite instead of writing NaN/inf.

// {"n": int, "m": int, "A": [["p/q", ...], ...], "b": ["p/q", ...]}
Json linear_set_to_json(const LinearSet& L);
LinearSet linear_set_from_json(const Json& j);

// {"steps": [{"y": ["p/q", ...], "w": ["p/q", ...]}, ...],
//  "faces": [[zero indices], ...]}
// n is the ambient dimension the face indices refer to.
Json fr_sequence_lp_to_json(const FRSequenceLP& seq);
FRSequenceLP fr_sequence_lp_from_json(const Json& j, int n);

// {"n": int, "m": int, "mats": [[[i, j, value], ...], ...], "b": [...],
//  "labels": [[i, j, k], ...] when present}
// Triplets address the upper triangle; values are numbers or "p/q" strings
// (parsed exactly, then converted to binary64).
Json sdp_problem_to_json(const SdpProblem& P);
SdpProblem sdp_problem_from_json(const Json& j);

// {"steps": [{"y": [...], "W": [[i, j, value], ...]}, ...], "faces": [...]}
// A face is an array of zero indices (coordinate block face) or an object
// {"V": [[row], ...]} holding a column-orthonormal basis.
Json fr_sequence_sdp_to_json(const FRSequenceSDP& seq);
FRSequenceSDP fr_sequence_sdp_from_json(const Json& j, int n);

// Single faces, in the formats the sequence files use.
Json orthant_face_to_json(const OrthantFace& f);
Json sdp_face_to_json(const SdpFace& f);
SdpFace sdp_face_from_json(const Json& j, int n);

// Problem JSON with the index-triple labels plus
// "meta": {"p": .., "q": .., "q_tilde": .., "d": ..}.
Json reduction_instance_to_json(const ReductionInstance& R);

// Whole-document parse; ParseError carries line/column on failure.
Json parse_json_text(const std::string& text);
Json load_json_file(const std::string& path);

// 2-space indent plus trailing newline: stable bytes for fixed content.
std::string dump_json(const Json& j);
void save_json_file(const std::string& path, const Json& j);

}  // namespace frtk
