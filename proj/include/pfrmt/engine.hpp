#pragma once
// JSON request/response engine: one entry point that dispatches every
// library operation the CLI and the C API expose.
//
// Request (schema "pfaffian-rmt/1"; full field reference in README.md):
//   { "schema": "pfaffian-rmt/1", "command": "partition" | "kpoint" |
//     "micro" | "wilson" | "verify" | "converge", ... }
//
// Response:
//   { "schema": "pfaffian-rmt/1", "command": ..., "result": {...},
//     "provenance": { "parameters": <normalized request echo>,
//                     "method": ..., "seed": ..., "tolerances": {...},
//                     "library": {"name": "pfrmt", "version": ...} } }
//
// Deterministic: identical requests produce byte-identical responses
// (Monte Carlo included, through the seeded counter-based stream).
// Malformed or out-of-domain requests throw validation_error; computations
// that cannot reach their accuracy contract throw numerical_error.  The
// C API converts these into exit-style status codes 1 / 2 plus a structured
// error object.

#include <string>

namespace pfrmt {

std::string engine_eval(const std::string& request_json);

// Semantic version of the library ("major.minor.patch").
const char* engine_version();

} // namespace pfrmt
