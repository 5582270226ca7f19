/* C interface to the facial reduction toolkit.
 *
 * Conventions:
 *   - Every function returning frtk_status follows the shared status map
 *     below. On FRTK_OK (and, where documented, FRTK_CLAIM_VIOLATED) the
 *     char** output receives a malloc'd UTF-8 JSON document; release it
 *     with frtk_string_free. On any other status outputs are untouched and
 *     frtk_last_error() describes the failure.
 *   - Handles are opaque; create them with the *_from_* constructors and
 *     release them with the matching *_free. NULL is always safe to free.
 *   - The library keeps no global state beyond a thread-local error string,
 *     so handles may be shared across threads for concurrent reads.
 *
 * Options arguments accept NULL, "", or a JSON object; unknown keys are
 * ignored. Keys, all optional, by command:
 *   lp analyze:   {"brute": bool, "seed": uint}
 *   sdp verify:   {"rank_tol": number > 0}
 *   sdp lowrank:  {"ranks": [int, ...], "seed": uint, "seeds": int >= 1,
 *                  "res_tol": number > 0, "max_iter": int >= 1}
 *   sat sequence: {"assign": [0/1, ...]}   (over the original variables, or
 *                                           the preprocessed ones)
 *   sat certify:  {"budget": int >= 1, "jobs": int >= 1}
 */

#ifndef FRTK_H
#define FRTK_H

#ifdef __cplusplus
extern "C" {
#endif

#if defined(FRTK_BUILD_SHARED) && defined(__GNUC__)
#define FRTK_API __attribute__((visibility("default")))
#else
#define FRTK_API
#endif

/* Mirrors the command-line exit codes. */
typedef enum frtk_status {
  FRTK_OK = 0,              /* success; any stated claims hold          */
  FRTK_CLAIM_VIOLATED = 1,  /* ran to completion but a claim failed     */
  FRTK_INPUT_ERROR = 2,     /* unreadable, unparsable, or invalid input */
  FRTK_INTERNAL_ERROR = 3,  /* an internal invariant broke: a bug       */
  FRTK_BUDGET_EXCEEDED = 4  /* work estimate above the caller's budget  */
} frtk_status;

typedef struct frtk_lp frtk_lp;   /* exact linear feasibility system   */
typedef struct frtk_sdp frtk_sdp; /* semidefinite feasibility system   */
typedef struct frtk_cnf frtk_cnf; /* CNF formula with ternary clauses  */

FRTK_API const char* frtk_version(void);

/* Thread-local message for the last failing call; "" when clean. The
 * pointer stays valid until the next failing call on the same thread. */
FRTK_API const char* frtk_last_error(void);

FRTK_API void frtk_string_free(char* s);

/* ----- construction and serialization ----- */

FRTK_API frtk_status frtk_lp_from_json(const char* text, frtk_lp** out);
FRTK_API void frtk_lp_free(frtk_lp* lp);

FRTK_API frtk_status frtk_sdp_from_json(const char* text, frtk_sdp** out);
/* Order-n chain instance whose reduction needs n-1 steps. */
FRTK_API frtk_status frtk_sdp_worst_case(int n, frtk_sdp** out);
FRTK_API frtk_status frtk_sdp_to_json(const frtk_sdp* sdp, char** json_out);
FRTK_API void frtk_sdp_free(frtk_sdp* sdp);

FRTK_API frtk_status frtk_cnf_from_dimacs(const char* text, frtk_cnf** out);
FRTK_API void frtk_cnf_free(frtk_cnf* cnf);

/* ----- commands; results are JSON documents ----- */

/* {"msd", "sd", "minimal_cone", "sequence", "brute_force"?}. With
 * options.brute the exhaustive degree is recomputed independently and a
 * disagreement returns FRTK_CLAIM_VIOLATED with the result still filled. */
FRTK_API frtk_status frtk_lp_analyze(const frtk_lp* lp,
                                     const char* options_json,
                                     char** result_json);

/* {"valid", "minimal", "length", "final_face", "diagnoses"}; an invalid
 * sequence returns FRTK_CLAIM_VIOLATED with the result filled. */
FRTK_API frtk_status frtk_lp_verify(const frtk_lp* lp,
                                    const char* sequence_json,
                                    char** result_json);

/* {"valid", "length", "rank_drops", "minimal_certified", "final_face",
 *  "diagnoses"}; invalid => FRTK_CLAIM_VIOLATED with the result filled. */
FRTK_API frtk_status frtk_sdp_verify(const frtk_sdp* sdp,
                                     const char* sequence_json,
                                     const char* options_json,
                                     char** result_json);

/* {"termination": "zero_face"|"search_exhausted", "length", "sequence",
 *  "residuals", "ranks", "seeds"}. Exhaustion is not an error: the search
 * is a heuristic and reports how far it got. */
FRTK_API frtk_status frtk_sdp_lowrank(const frtk_sdp* sdp,
                                      const char* options_json,
                                      char** result_json);

/* The reduction instance for the formula (preprocessed, duplicated):
 * problem JSON plus "labels" and "meta" {p, q, q_tilde, d}. When
 * preprocessing removes every clause the result is {"trivialized": true}. */
FRTK_API frtk_status frtk_sat_reduce(const frtk_cnf* cnf, char** result_json);

/* Witness chain for a satisfying assignment: {"p", "q", "d", "length",
 * "valid", "assignment", "rank_drops", "sequence"}. The assignment may be
 * given over the original variables (it is projected through preprocessing)
 * or over the preprocessed ones; the echo shows the one used. A falsifying
 * assignment is FRTK_INPUT_ERROR. */
FRTK_API frtk_status frtk_sat_sequence(const frtk_cnf* cnf,
                                       const char* options_json,
                                       char** result_json);

/* {"satisfiable", "trivialized", "msd", "d", "witness_assignment"?,
 *  "witness_sequence"?}. The reduction's degree criterion and brute-force
 * satisfiability are computed independently; if they ever disagree the
 * call returns FRTK_CLAIM_VIOLATED (a bug detector, not an input error). */
FRTK_API frtk_status frtk_sat_certify(const frtk_cnf* cnf,
                                      const char* options_json,
                                      char** result_json);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* FRTK_H */
